use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use multab::automata::{render_fsa, Fsa};
use multab::grammars::{enumerate_cfg, parse_cfg, pumping_pairs, render_cfg, Cfg};
use multab::groups::{Backend, GroupSpec};
use multab::hyperbolicity::{
    flabby_check, refine_subcombing, synthesize_irreducible_table_grammar, synthesize_table_grammar, table_grammar,
    triangulate_cycle,
};
use multab::table::{
    column_cfg_from_comparator, column_language, comparator as comparator_pairs, enumerate_table, finite_table_fsa,
    free_comparator_transducer, free_product_comparator_transducer, letter_image, render_letter, sigma_star_roundtrip as roundtrip,
    theorem_bi_pipeline, ColumnSpec, TableSpec,
};
use multab::transducers::Transducer;
use multab::words::{split_on_hash, words_up_to, Alphabet, Symbol, Word};
use multab::Limits;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::report::Report;
use crate::Failure;

type Outcome = Result<Report, Failure>;

/// Slopes against which the width statistic is reported.
const SLOPES: [(&str, f64); 4] = [("1/75", 1.0 / 75.0), ("1/36", 1.0 / 36.0), ("1/18", 1.0 / 18.0), ("1/6", 1.0 / 6.0)];

/// Largest diagonal excess over n/6 tolerated for triangulations.
const K_BOUND: f64 = 3.0;

fn table_spec(cfg: &ExperimentConfig, default_combing: &str) -> Result<(TableSpec, String), Failure> {
    let g = cfg.load_group()?;
    let (r, name) = cfg.load_combing(&g, default_combing)?;
    Ok((TableSpec::new(g, r, &cfg.limits())?, name))
}

fn show(al: &Alphabet, w: &Word) -> String {
    al.display(w)
}

fn lines(al: &Alphabet, words: &[Word]) -> String {
    words.iter().map(|w| al.render(w) + "\n").collect()
}

// Σ_ε in a fixed order: ε first, then the letters.
fn letters_eps(al: &Alphabet) -> Vec<Option<Symbol>> {
    std::iter::once(None).chain(al.letters().map(Some)).collect()
}

fn letter_file_name(al: &Alphabet, a: Option<Symbol>) -> String {
    match a {
        Some(l) => al.name(l).to_string(),
        None => "eps".into(),
    }
}

fn parse_letter(al: &Alphabet, s: &str) -> Result<Option<Symbol>, Failure> {
    if matches!(s, "eps" | "ε" | "") {
        return Ok(None);
    }
    let w = al.parse(s)?;
    match w.symbols() {
        [l] if !l.is_hash() => Ok(Some(*l)),
        _ => Err(Failure::config(format!("expected a single letter or eps, got {s:?}"))),
    }
}

/// The comparator transducer for backends that have one, with the combing
/// it is stated for.
fn comparator_transducer(g: &GroupSpec, combing: &str, a: Option<Symbol>) -> Result<Option<Transducer>, Failure> {
    Ok(match (g.backend(), combing) {
        (Backend::Free { rank }, "geodesic" | "shortlex") => Some(free_comparator_transducer(*rank, a)),
        (Backend::FreeProduct(_), "geodesic") => Some(free_product_comparator_transducer(g, a)?),
        _ => None,
    })
}

pub fn table_enum(cfg: &ExperimentConfig) -> Outcome {
    let (ts, combing) = table_spec(cfg, "geodesic")?;
    let words = enumerate_table(&ts, cfg.maxlen, &cfg.limits())?;
    let mut by_length: BTreeMap<usize, usize> = BTreeMap::new();
    for w in &words {
        *by_length.entry(w.len()).or_default() += 1;
    }
    let mut r = Report::new(cfg, "multiplication table M = {u#v#w : u, v, w in R, uvw = 1}", "enumeration up to maxlen");
    for w in &words {
        r.check(ts.is_table_word(w)?, format!("{} is not a table word", show(ts.alphabet(), w)));
    }
    r.result = json!({
        "group": ts.group.name(),
        "combing": combing,
        "closed_under_inverses": ts.closed_under_inverses,
        "count": words.len(),
        "by_length": by_length,
    });
    r.artifact("table.txt", lines(ts.alphabet(), &words));
    Ok(r)
}

pub fn table_fsa_check(cfg: &ExperimentConfig) -> Outcome {
    let (ts, combing) = table_spec(cfg, "sigma-star")?;
    let limits = cfg.limits();
    let al = ts.alphabet().clone();
    let m = finite_table_fsa(&ts.group, &ts.combing, &limits)?;
    let dfa = m.to_dfa(&limits)?;
    let r_dfa = ts.combing.to_dfa(&limits)?;
    let symbols: Vec<Symbol> = al.symbols_with_hash().collect();
    let total: f64 = (0..=cfg.maxlen).map(|k| (symbols.len() as f64).powi(k as i32)).sum();
    if total > limits.output as f64 {
        return Err(Failure::Budget(format!("{total} words exceed the output budget of {}", limits.output)));
    }
    let mut r = Report::new(
        cfg,
        "a finite group has a regular multiplication table",
        "acceptor membership equals the definition on every word over Σ_# up to maxlen",
    );
    let mut checked = 0usize;
    let mut accepted = 0usize;
    for w in words_up_to(&symbols, cfg.maxlen) {
        let parts = split_on_hash(&w);
        let want = parts.len() == 3
            && parts.iter().all(|p| r_dfa.accepts(p))
            && ts.group.is_identity(&ts.group.evaluate(&w)?);
        let got = dfa.accepts(&w);
        r.check(got == want, format!("{}: acceptor says {got}, definition says {want}", show(&al, &w)));
        checked += 1;
        accepted += got as usize;
    }
    let min = dfa.minimize();
    r.result = json!({
        "group": ts.group.name(),
        "combing": combing,
        "words_checked": checked,
        "accepted": accepted,
        "minimal_states": min.num_states(),
    });
    r.artifact("table.fsa", render_fsa(&min.to_fsa()));
    Ok(r)
}

pub fn flabby(cfg: &ExperimentConfig) -> Outcome {
    let (ts, combing) = table_spec(cfg, "geodesic")?;
    let limits = cfg.limits();
    let first = cfg.maxlen.min(8);
    let mut series = Vec::new();
    let mut c75 = Vec::new();
    let mut last = None;
    for maxlen in first..=cfg.maxlen {
        let rep = flabby_check(&ts.group, &ts.combing, maxlen, SLOPES[0].1, &limits)?;
        let per_slope: BTreeMap<&str, f64> = SLOPES
            .iter()
            .map(|&(name, s)| {
                let c = rep.scatter.iter().map(|p| p.width as f64 - s * p.norm as f64).fold(f64::NEG_INFINITY, f64::max);
                (name, c)
            })
            .collect();
        c75.push(rep.c_emp);
        series.push(json!({
            "maxlen": maxlen,
            "triangles": rep.triangles,
            "max_width": rep.max_width,
            "c_emp": per_slope,
        }));
        last = Some(rep);
    }
    let rep = last.expect("at least one maxlen");
    let (direction, ok) = if cfg.expect_nonhyperbolic {
        let grows = c75.windows(2).all(|w| w[1] >= w[0]) && c75.last() > c75.first();
        ("C_emp at slope 1/75 grows with maxlen", grows)
    } else {
        let bounded = c75.iter().all(|c| c.is_finite()) && c75.windows(2).all(|w| w[1] <= w[0]);
        ("C_emp at slope 1/75 is finite and non-increasing in maxlen", bounded)
    };
    let mut r = Report::new(cfg, "triangle width at most |T|/75 + C", direction);
    r.check(ok, format!("C_emp series {c75:?}"));
    r.result = json!({
        "group": ts.group.name(),
        "combing": combing,
        "series": series,
        "max_width": rep.max_width,
    });
    let mut csv = String::from("norm,width,count\n");
    for p in &rep.scatter {
        csv += &format!("{},{},{}\n", p.norm, p.width, p.count);
    }
    r.artifact("flabby_scatter.csv", csv);
    Ok(r)
}

// A random walk closed by a geodesic back to the identity.
fn random_cycle(g: &GroupSpec, rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let letters: Vec<Symbol> = g.alphabet().letters().collect();
    loop {
        let k = rng.gen_range(2..=max_len.max(4) / 2);
        let walk: Word = (0..k).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
        let back = g.normal_form(&g.inverse(&g.evaluate(&walk).expect("letters only")));
        let cycle = walk.concat(&back);
        if cycle.len() >= 4 && cycle.len() <= max_len {
            return cycle;
        }
    }
}

pub fn triangulate(cfg: &ExperimentConfig, cycle: Option<&str>, count: usize) -> Outcome {
    let g = cfg.load_group()?;
    let al = g.alphabet().clone();
    let cycles: Vec<Word> = match cycle {
        Some(text) => vec![al.parse(text)?],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..count).map(|_| random_cycle(&g, &mut rng, cfg.maxlen)).collect()
        }
    };
    let mut r = Report::new(
        cfg,
        "a cycle of length n has a triangulation by diagonals of length at most n/6 + K",
        "every sampled cycle; K_emp = max(diagonal length - n/6)",
    );
    let mut records = Vec::new();
    let mut k_emp: f64 = 0.0;
    for c in &cycles {
        let tri = triangulate_cycle(&g, c, cfg.policy)?;
        r.check(tri.is_valid(), format!("invalid triangulation of {}", show(&al, c)));
        if tri.n == 4 {
            r.check(tri.diagonals[0].length <= 2, format!("first diagonal of {} longer than 2", show(&al, c)));
        }
        k_emp = k_emp.max(tri.excess());
        records.push(json!({
            "cycle": al.render(c),
            "n": tri.n,
            "max_diagonal": tri.max_length(),
            "excess": tri.excess(),
            "diagonals": tri.diagonals,
        }));
    }
    r.check(k_emp <= K_BOUND, format!("K_emp = {k_emp} exceeds {K_BOUND}"));
    r.result = json!({ "group": g.name(), "policy": cfg.policy, "k_emp": k_emp, "cycles": records });
    Ok(r)
}

pub fn synthesize_grammar(cfg: &ExperimentConfig, irreducible: bool) -> Outcome {
    let g = cfg.load_group()?;
    let limits = cfg.limits();
    let grammar = if irreducible {
        synthesize_irreducible_table_grammar(&g, cfg.delta, &limits)?
    } else {
        synthesize_table_grammar(&g, cfg.delta, &limits)?
    };
    let words = enumerate_cfg(&grammar, cfg.maxlen, &limits)?;
    let mut r = Report::new(
        cfg,
        "productions preserve group images, so every derived word projects to 1",
        "every generated word up to maxlen evaluates to the identity",
    );
    for w in &words {
        r.check(g.is_identity(&g.evaluate(w)?), format!("{} does not evaluate to 1", show(g.alphabet(), w)));
    }
    r.result = json!({
        "group": g.name(),
        "delta": cfg.delta,
        "irreducible": irreducible,
        "nonterminals": grammar.num_nonterminals(),
        "productions": grammar.productions().len(),
        "words_checked": words.len(),
    });
    r.artifact("grammar.cfg", render_cfg(&grammar));
    Ok(r)
}

fn compare_words(r: &mut Report, al: &Alphabet, label: &str, got: &[Word], want: &[Word]) {
    let a: BTreeSet<&Word> = got.iter().collect();
    let b: BTreeSet<&Word> = want.iter().collect();
    r.fail_with(b.difference(&a).map(|w| format!("{label}: {} missing", show(al, w))));
    r.fail_with(a.difference(&b).map(|w| format!("{label}: {} unexpected", show(al, w))));
}

pub fn theorem1_check(cfg: &ExperimentConfig) -> Outcome {
    let (ts, combing) = table_spec(cfg, "geodesic")?;
    let limits = cfg.limits();
    let m = table_grammar(&ts.group, &ts.combing, cfg.delta, &limits)?;
    let got = enumerate_cfg(&m, cfg.maxlen, &limits)?;
    let want = enumerate_table(&ts, cfg.maxlen, &limits)?;
    let mut r = Report::new(
        cfg,
        "a hyperbolic group has a context-free multiplication table M = L ∩ R#R#R",
        "bounded equality of the grammar's language with M up to maxlen",
    );
    compare_words(&mut r, ts.alphabet(), "M", &got, &want);
    r.result = json!({
        "group": ts.group.name(),
        "combing": combing,
        "delta": cfg.delta,
        "grammar_nonterminals": m.num_nonterminals(),
        "grammar_productions": m.productions().len(),
        "table_words": want.len(),
    });
    r.artifact("table_grammar.cfg", render_cfg(&m));
    Ok(r)
}

pub fn theorem2_check(cfg: &ExperimentConfig) -> Outcome {
    let g = cfg.load_group()?;
    let limits = cfg.limits();
    let al = g.alphabet().clone();
    let sigma = Fsa::sigma_star(al.clone());
    let ts = TableSpec::new(g.clone(), sigma.clone(), &limits)?;
    let want = enumerate_table(&ts, cfg.maxlen, &limits)?;
    if g.is_finite() {
        let m = finite_table_fsa(&g, &sigma, &limits)?;
        let got = m.enumerate(cfg.maxlen, &limits)?;
        let rt = roundtrip(&g, &limits)?;
        let mut r = Report::new(
            cfg,
            "for R = Σ*, G is finite iff M is regular",
            "finite ⇒ regular: acceptor built, bounded equality with M, and both Σ* reductions",
        );
        compare_words(&mut r, &al, "M", &got, &want);
        r.check(rt.table_from_word_problem && rt.word_problem_from_table, format!("{rt:?}"));
        r.result = json!({ "group": g.name(), "regular": true, "table_words": want.len(), "roundtrip": rt });
        return Ok(r);
    }
    let virtually_free = matches!(g.backend(), Backend::Free { .. } | Backend::FreeProduct(_));
    if !virtually_free {
        let mut r = Report::new(
            cfg,
            "for R = Σ*, G is virtually free iff M is context-free",
            "no implementable direction for this backend; table enumerated only",
        );
        r.result = json!({ "group": g.name(), "regular": false, "table_words": want.len() });
        return Ok(r);
    }
    let m = table_grammar(&g, &sigma, cfg.delta, &limits)?;
    let got = enumerate_cfg(&m, cfg.maxlen, &limits)?;
    let mut r = Report::new(
        cfg,
        "for R = Σ*, G is virtually free iff M is context-free",
        "virtually free ⇒ context-free: grammar ∩ Σ*#Σ*#Σ* equals M up to maxlen",
    );
    compare_words(&mut r, &al, "M", &got, &want);
    r.check(finite_table_fsa(&g, &sigma, &limits).is_err(), "infinite group produced a finite table acceptor");
    r.result = json!({
        "group": g.name(),
        "regular": false,
        "grammar_productions": m.productions().len(),
        "table_words": want.len(),
    });
    Ok(r)
}

pub fn columns(cfg: &ExperimentConfig, element: Option<&str>) -> Outcome {
    let (ts, combing) = table_spec(cfg, "geodesic")?;
    let limits = cfg.limits();
    let al = ts.alphabet().clone();
    let mut r = Report::new(
        cfg,
        "columns C(ā) = {u#w : u, w in R, u ā w = 1}",
        "column enumeration; equality with the comparator-derived grammar when one exists",
    );
    let mut out = String::new();
    let mut summary = Vec::new();
    let targets: Vec<(String, multab::groups::Element, Option<Option<Symbol>>)> = match element {
        Some(text) => {
            let w = al.parse(text)?;
            vec![(al.render(&w), ts.group.evaluate(&w)?, None)]
        }
        None => letters_eps(&al).into_iter().map(|a| (render_letter(&al, a), letter_image(&ts.group, a), Some(a))).collect(),
    };
    for (name, g, letter) in targets {
        let words = column_language(&ColumnSpec { table: ts.clone(), g }, cfg.maxlen, &limits)?;
        let mut grammar_checked = false;
        if let (Some(a), true) = (letter, ts.closed_under_inverses) {
            if let Some(t) = comparator_transducer(&ts.group, &combing, a)? {
                let cfg_a = column_cfg_from_comparator(&t, &ts.combing, &limits)?;
                let got = enumerate_cfg(&cfg_a, cfg.maxlen, &limits)?;
                compare_words(&mut r, &al, &format!("C({name})"), &got, &words);
                grammar_checked = true;
            }
        }
        for w in &words {
            out += &format!("{name}\t{}\n", al.render(w));
        }
        summary.push(json!({ "element": name, "words": words.len(), "grammar_checked": grammar_checked }));
    }
    r.result = json!({ "group": ts.group.name(), "combing": combing, "columns": summary });
    r.artifact("columns.tsv", out);
    Ok(r)
}

pub fn comparator(cfg: &ExperimentConfig, letter: Option<&str>) -> Outcome {
    let (ts, combing) = table_spec(cfg, "geodesic")?;
    let limits = cfg.limits();
    let al = ts.alphabet().clone();
    let letters = match letter {
        Some(s) => vec![parse_letter(&al, s)?],
        None => letters_eps(&al),
    };
    let mut r = Report::new(
        cfg,
        "comparator ρ_a = {(u, w) : u, w in R, u ā = w} is a rational transduction",
        "enumerated ρ_a equals the transducer's relation on R × R up to maxlen",
    );
    let mut out = String::new();
    let mut summary = Vec::new();
    for a in letters {
        let name = render_letter(&al, a);
        let pairs = comparator_pairs(&ts, a, cfg.maxlen, &limits)?;
        let mut transducer_states = None;
        if let Some(t) = comparator_transducer(&ts.group, &combing, a)? {
            let t = t.restrict(&ts.combing, &ts.combing, &limits)?;
            transducer_states = Some(t.num_states());
            let got: BTreeSet<(Word, Word)> = t.bounded_pairs(cfg.maxlen, cfg.maxlen, &limits)?.into_iter().collect();
            let want: BTreeSet<(Word, Word)> = pairs.iter().cloned().collect();
            r.fail_with(want.difference(&got).map(|(u, v)| format!("{name}: ({}, {}) missing", show(&al, u), show(&al, v))));
            r.fail_with(got.difference(&want).map(|(u, v)| format!("{name}: ({}, {}) unexpected", show(&al, u), show(&al, v))));
        }
        for (u, v) in &pairs {
            out += &format!("{name}\t{}\t{}\n", al.render(u), al.render(v));
        }
        summary.push(json!({ "letter": name, "pairs": pairs.len(), "transducer_states": transducer_states }));
    }
    r.result = json!({ "group": ts.group.name(), "combing": combing, "letters": summary });
    r.artifact("comparator.tsv", out);
    Ok(r)
}

fn load_column_grammars(dir: &Path, al: &std::sync::Arc<Alphabet>) -> Result<BTreeMap<Option<Symbol>, Cfg>, Failure> {
    let mut out = BTreeMap::new();
    for a in letters_eps(al) {
        let path = dir.join(format!("{}.cfg", letter_file_name(al, a)));
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            out.insert(a, parse_cfg(&text, al.clone())?);
        }
    }
    if out.is_empty() {
        return Err(Failure::config(format!("no column grammars found in {}", dir.display())));
    }
    Ok(out)
}

// R₁ = ∩ R_a, where R_a drops every word reducible by a pumping pair of
// the column grammar for a.
fn refined_combing(ts: &TableSpec, grammars: &BTreeMap<Option<Symbol>, Cfg>, limits: &Limits) -> Result<(Fsa, usize), Failure> {
    let mut r1 = ts.combing.clone();
    let mut total = 0;
    for g in grammars.values() {
        let pruned = g.prune();
        if pruned.productions().is_empty() {
            continue;
        }
        let pairs: Vec<(Word, Word)> = pumping_pairs(&pruned.to_cnf()?, Some(8), limits)?
            .into_iter()
            .filter(|(x, _)| !x.contains_hash())
            .collect();
        total += pairs.len();
        r1 = r1.intersect(&refine_subcombing(&ts.combing, &pairs, limits)?, limits)?;
    }
    Ok((r1.to_dfa(limits)?.minimize().to_fsa(), total))
}

pub fn theorem3_pipeline(cfg: &ExperimentConfig, grammar_dir: Option<&Path>, refine: bool) -> Outcome {
    let (ts, combing) = table_spec(cfg, "geodesic")?;
    let limits = cfg.limits();
    let al = ts.alphabet().clone();
    let grammars = match grammar_dir {
        Some(dir) => load_column_grammars(dir, &al)?,
        None => {
            if !ts.closed_under_inverses {
                return Err(multab::Error::NotInverseClosed.into());
            }
            let mut out = BTreeMap::new();
            for a in letters_eps(&al) {
                let Some(t) = comparator_transducer(&ts.group, &combing, a)? else {
                    return Err(Failure::config(format!(
                        "no builtin comparator for {} with combing {combing}; pass --grammars",
                        ts.group.name()
                    )));
                };
                out.insert(a, column_cfg_from_comparator(&t, &ts.combing, &limits)?);
            }
            out
        }
    };
    let mut r = Report::new(
        cfg,
        "context-free columns for all a in Σ_ε iff asynchronously automatic over an inverse-closed combing",
        "",
    );
    let mut refinement = serde_json::Value::Null;
    let ts = if refine {
        let (r1, pairs) = refined_combing(&ts, &grammars, &limits)?;
        let surjective = multab::groups::is_surjective_at_radius(&ts.group, &r1, 3, &limits)?;
        r.check(surjective, "refined combing is not surjective at radius 3");
        refinement = json!({ "pumping_pairs": pairs, "surjective_at_radius_3": surjective });
        TableSpec::new(ts.group.clone(), r1, &limits)?
    } else {
        ts
    };
    let report = theorem_bi_pipeline(&ts, &grammars, cfg.maxlen, cfg.seed, &limits)?;
    r.direction = report.direction.clone();
    r.fail_with(report.counterexamples.iter().cloned());
    r.result = json!({
        "group": ts.group.name(),
        "combing": combing,
        "refinement": refinement,
        "inputs_checked": report.inputs_checked,
        "letters": report.letters,
    });
    for (a, g) in &grammars {
        r.artifact(&format!("column_{}.cfg", letter_file_name(&al, *a)), render_cfg(g));
    }
    Ok(r)
}

pub fn sigma_star_roundtrip(cfg: &ExperimentConfig) -> Outcome {
    let g = cfg.load_group()?;
    let rt = roundtrip(&g, &cfg.limits())?;
    let mut r = Report::new(
        cfg,
        "W = f(M ∩ Σ*##) and M = f⁻¹(W) ∩ Σ*#Σ*#Σ* for R = Σ*",
        "both equalities, by minimized-automaton comparison",
    );
    r.check(rt.table_from_word_problem, "M differs from f⁻¹(W) ∩ Σ*#Σ*#Σ*");
    r.check(rt.word_problem_from_table, "W differs from f(M ∩ Σ*##)");
    r.result = serde_json::to_value(&rt).map_err(|e| Failure::config(e.to_string()))?;
    Ok(r)
}
