//! Experiment configuration: optional TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use clap::Args;
use multab::automata::{parse_fsa, Fsa};
use multab::groups::{geodesic_combing, parse_group_file, shortlex_combing, GroupSpec};
use multab::hyperbolicity::TriangulationPolicy;
use multab::Limits;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Flags shared by every experiment.
#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Group definition file or builtin name (f2, z3, s3, dinf, zsq, ...).
    #[arg(long, global = true, value_name = "FILE|NAME")]
    pub group: Option<String>,
    /// Combing: geodesic, shortlex, sigma-star, or an acceptor file.
    #[arg(long, global = true, value_name = "NAME|FILE")]
    pub combing: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub maxlen: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub delta: Option<usize>,
    /// Triangulation policy: greedy or paper.
    #[arg(long, global = true)]
    pub policy: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Directory for the report and artifacts; without it the report goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Expect growing width statistics (flabby).
    #[arg(long, global = true)]
    pub expect_nonhyperbolic: bool,
    #[arg(long, global = true, value_name = "N")]
    pub budget_states: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub budget_elements: Option<usize>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    group: Option<String>,
    combing: Option<String>,
    maxlen: Option<usize>,
    delta: Option<usize>,
    policy: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    expect_nonhyperbolic: Option<bool>,
    budget_states: Option<usize>,
    budget_elements: Option<usize>,
}

/// Resolved configuration, recorded verbatim in every report.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub group: String,
    pub combing: Option<String>,
    pub maxlen: usize,
    pub delta: usize,
    pub policy: TriangulationPolicy,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub expect_nonhyperbolic: bool,
    pub budget_states: usize,
    pub budget_elements: usize,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn resolve(experiment: &str, flags: &Common, default_maxlen: usize) -> Result<ExperimentConfig, Failure> {
        let (file, base_dir) = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
                let parsed: FileConfig =
                    toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
                (parsed, path.parent().map(Path::to_path_buf))
            }
            None => (FileConfig::default(), None),
        };
        let defaults = Limits::default();
        let policy = match flags.policy.clone().or(file.policy) {
            Some(p) => p.parse().map_err(|e: multab::Error| Failure::config(e.to_string()))?,
            None => TriangulationPolicy::Greedy,
        };
        let cfg = ExperimentConfig {
            experiment: experiment.to_string(),
            group: flags.group.clone().or(file.group).unwrap_or_else(|| "f2".into()),
            combing: flags.combing.clone().or(file.combing),
            maxlen: flags.maxlen.or(file.maxlen).unwrap_or(default_maxlen),
            delta: flags.delta.or(file.delta).unwrap_or(1),
            policy,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            out: flags.out.clone().or(file.out),
            expect_nonhyperbolic: flags.expect_nonhyperbolic || file.expect_nonhyperbolic.unwrap_or(false),
            budget_states: flags.budget_states.or(file.budget_states).unwrap_or(defaults.states),
            budget_elements: flags.budget_elements.or(file.budget_elements).unwrap_or(defaults.elements),
            base_dir,
        };
        if cfg.maxlen == 0 {
            return Err(Failure::config("maxlen must be at least 1"));
        }
        Ok(cfg)
    }

    pub fn limits(&self) -> Limits {
        Limits { states: self.budget_states, elements: self.budget_elements, ..Limits::default() }
    }

    // Relative paths in a config file are relative to that file.
    fn path(&self, p: &str) -> PathBuf {
        let p = PathBuf::from(p);
        match (&self.base_dir, p.is_relative()) {
            (Some(base), true) if !p.exists() => base.join(p),
            _ => p,
        }
    }

    pub fn load_group(&self) -> Result<GroupSpec, Failure> {
        if let Some(g) = GroupSpec::builtin(&self.group) {
            return Ok(g);
        }
        let path = self.path(&self.group);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::config(format!("group {:?} is neither builtin nor readable: {e}", self.group)))?;
        parse_group_file(&text, path.parent()).map_err(Failure::from)
    }

    /// The combing and its display name; `default` applies when none is set.
    pub fn load_combing(&self, g: &GroupSpec, default: &str) -> Result<(Fsa, String), Failure> {
        let name = self.combing.clone().unwrap_or_else(|| default.to_string());
        let fsa = match name.as_str() {
            "geodesic" => geodesic_combing(g)?.fsa,
            "shortlex" => shortlex_combing(g)?.fsa,
            "sigma-star" => Fsa::sigma_star(g.alphabet().clone()),
            file => {
                let path = self.path(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Failure::config(format!("combing {file:?} is neither builtin nor readable: {e}")))?;
                parse_fsa(&text, g.alphabet().clone())?
            }
        };
        if fsa.uses_hash() {
            return Err(Failure::config("a combing may not use the marker #"));
        }
        Ok((fsa, name))
    }
}
