//! Versioned JSON reports plus side files (word lists, CSV scatter).

use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::Failure;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub experiment: String,
    /// The statement the experiment tests.
    pub anchor: String,
    /// Which implication, at which bound, was checked.
    pub direction: String,
    pub config: ExperimentConfig,
    pub passed: bool,
    pub result: Value,
    pub counterexamples: Vec<String>,
    #[serde(skip)]
    pub artifacts: Vec<(String, String)>,
    #[serde(skip)]
    out: Option<PathBuf>,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig, anchor: &str, direction: &str) -> Report {
        Report {
            schema: SCHEMA,
            experiment: cfg.experiment.clone(),
            anchor: anchor.to_string(),
            direction: direction.to_string(),
            config: cfg.clone(),
            passed: true,
            result: Value::Null,
            counterexamples: Vec::new(),
            artifacts: Vec::new(),
            out: cfg.out.clone(),
        }
    }

    /// Records failures; the report passes only if none were recorded.
    pub fn fail_with(&mut self, counterexamples: impl IntoIterator<Item = String>) {
        let before = self.counterexamples.len();
        self.counterexamples.extend(counterexamples);
        if self.counterexamples.len() > before {
            self.passed = false;
        }
    }

    pub fn check(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.fail_with([message.into()]);
        }
    }

    pub fn artifact(&mut self, name: &str, content: String) {
        self.artifacts.push((name.to_string(), content));
    }

    /// Writes `<experiment>.json` and the artifacts under the output
    /// directory, or prints the JSON when there is none.
    pub fn emit(&self) -> Result<(), Failure> {
        let json = serde_json::to_string_pretty(self).map_err(|e| Failure::config(e.to_string()))?;
        let Some(dir) = &self.out else {
            println!("{json}");
            return Ok(());
        };
        let io = |e: std::io::Error| Failure::config(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join(format!("{}.json", self.experiment)), json + "\n").map_err(io)?;
        for (name, content) in &self.artifacts {
            std::fs::write(dir.join(name), content).map_err(io)?;
        }
        println!("{}: {}", self.experiment, if self.passed { "pass" } else { "FAIL" });
        Ok(())
    }
}
