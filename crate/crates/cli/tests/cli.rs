use std::path::Path;
use std::process::Command;

fn multab(args: &[&str], out: &Path) -> (i32, serde_json::Value) {
    let output = Command::new(env!("CARGO_BIN_EXE_multab")).args(args).arg("--out").arg(out).output().unwrap();
    let code = output.status.code().unwrap();
    let name = args[0];
    let report = std::fs::read_to_string(out.join(format!("{name}.json")))
        .map(|s| serde_json::from_str(&s).unwrap())
        .unwrap_or(serde_json::Value::Null);
    (code, report)
}

#[test]
fn table_grammar_matches_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = multab(&["theorem1-check", "--group", "f2", "--maxlen", "10"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["passed"], true);
    assert_eq!(report["config"]["maxlen"], 10);
    assert!(report["result"]["table_words"].as_u64().unwrap() > 0);
}

#[test]
fn finite_table_acceptor() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = multab(&["table-fsa-check", "--group", "z3"], dir.path());
    assert_eq!(code, 0);
    assert!(report["counterexamples"].as_array().unwrap().is_empty());
    assert!(dir.path().join("table.fsa").exists());
}

#[test]
fn flabby_distinguishes_z_squared() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["flabby", "--group", "zsq", "--maxlen", "10"];
    let (code, _) = multab(&[&args[..], &["--expect-nonhyperbolic"]].concat(), dir.path());
    assert_eq!(code, 0);
    let (code, report) = multab(&args, dir.path());
    assert_eq!(code, 1);
    assert_eq!(report["passed"], false);
    let (code, _) = multab(&["flabby", "--group", "f2", "--maxlen", "10"], dir.path());
    assert_eq!(code, 0);
}

#[test]
fn config_and_budget_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(multab(&["table-enum", "--group", "nosuchgroup"], dir.path()).0, 2);
    assert_eq!(multab(&["table-fsa-check", "--group", "f2"], dir.path()).0, 2);
    assert_eq!(multab(&["table-enum", "--maxlen", "0"], dir.path()).0, 2);
    assert_eq!(multab(&["table-enum", "--budget-states", "2"], dir.path()).0, 3);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "colour = 3\n").unwrap();
    assert_eq!(multab(&["table-enum", "--config", bad.to_str().unwrap()], dir.path()).0, 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "group = \"dinf\"\nmaxlen = 4\nseed = 5\n").unwrap();
    let (code, report) = multab(&["table-enum", "--config", file.to_str().unwrap(), "--maxlen", "6"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(report["config"]["group"], "dinf");
    assert_eq!(report["config"]["maxlen"], 6);
    assert_eq!(report["config"]["seed"], 5);
}

#[test]
fn triangulations_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (code, a) = multab(&["triangulate", "--count", "20", "--seed", "3"], dir.path());
    assert_eq!(code, 0);
    let (_, b) = multab(&["triangulate", "--count", "20", "--seed", "3"], dir.path());
    assert_eq!(a["result"], b["result"]);
    let (code, c) = multab(&["triangulate", "--group", "zsq", "--cycle", "aabbAABB", "--policy", "paper"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(c["result"]["cycles"][0]["n"], 8);
}

#[test]
fn column_grammars_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = multab(&["theorem3-pipeline", "--maxlen", "4"], dir.path());
    assert_eq!(code, 0);
    let grammars = dir.path().join("grammars");
    std::fs::create_dir(&grammars).unwrap();
    for l in ["eps", "a", "A", "b", "B"] {
        std::fs::copy(dir.path().join(format!("column_{l}.cfg")), grammars.join(format!("{l}.cfg"))).unwrap();
    }
    let (code, report) = multab(&["theorem3-pipeline", "--maxlen", "4", "--grammars", grammars.to_str().unwrap()], dir.path());
    assert_eq!(code, 0);
    assert_eq!(report["passed"], true);
}

#[test]
fn remaining_experiments_pass() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["synthesize-grammar", "--group", "z3"][..],
        &["theorem2-check", "--group", "s3", "--maxlen", "6"],
        &["theorem2-check", "--group", "f1"],
        &["columns", "--group", "dinf"],
        &["comparator", "--letter", "a"],
        &["sigma-star-roundtrip", "--group", "z2"],
        &["table-enum", "--group", "s3", "--combing", "shortlex"],
    ] {
        let (code, report) = multab(args, dir.path());
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(report["schema"], 1);
    }
}
