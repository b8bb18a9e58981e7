//! `multab`: runs one experiment per invocation and writes a JSON report.
//!
//! Exit status: 0 when every assertion holds, 1 on a failed assertion,
//! 2 on a configuration error, 3 when a budget is exhausted.

mod config;
mod experiments;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Common, ExperimentConfig};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "multab", version, about = "Multiplication-table languages of finitely generated groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the table words u#v#w up to maxlen.
    TableEnum,
    /// Compare the finite-group table acceptor with the definition on all short words.
    TableFsaCheck,
    /// Triangle widths against norm, with empirical constants per slope.
    Flabby,
    /// Triangulate a cycle, or a seeded sample of random cycles.
    Triangulate {
        /// A word labelling a cycle; without it, random cycles are drawn.
        #[arg(long)]
        cycle: Option<String>,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Build the grammar of identity words on δ-ball nonterminals.
    SynthesizeGrammar {
        /// Keep only productions with no reducible block.
        #[arg(long)]
        irreducible: bool,
    },
    /// Context-free table: grammar ∩ R#R#R against the enumerated table.
    #[command(name = "theorem1-check")]
    Theorem1Check,
    /// Σ* table: regular for finite groups, context-free for free groups.
    #[command(name = "theorem2-check")]
    Theorem2Check,
    /// Columns C(ā), checked against the comparator grammar when one exists.
    Columns {
        /// Column of this element instead of every a ∈ Σ_ε.
        #[arg(long)]
        element: Option<String>,
    },
    /// Comparator relations ρ_a, checked against the comparator transducer.
    Comparator {
        /// A single letter, or "eps" for the empty word.
        #[arg(long)]
        letter: Option<String>,
    },
    /// Column grammars to comparators and back, exhaustively verified.
    #[command(name = "theorem3-pipeline")]
    Theorem3Pipeline {
        /// Directory of column grammars named eps.cfg, a.cfg, A.cfg, ...
        #[arg(long, value_name = "DIR")]
        grammars: Option<std::path::PathBuf>,
        /// Replace the combing by the intersection of its pumped-down refinements.
        #[arg(long)]
        refine: bool,
    },
    /// W and M for R = Σ*, each recovered from the other.
    SigmaStarRoundtrip,
}

/// Why an experiment could not produce a passing report.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Budget(String),
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Failure {
        Failure::Config(message.into())
    }
}

impl From<multab::Error> for Failure {
    fn from(e: multab::Error) -> Failure {
        use multab::Error::*;
        match e {
            BudgetExceeded(_) | StateBudgetExceeded(_) | OutputBudgetExceeded(_) | SearchBudgetExceeded(_) => {
                Failure::Budget(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    use Command::*;
    let (name, default_maxlen) = match &cli.command {
        TableEnum => ("table-enum", 8),
        TableFsaCheck => ("table-fsa-check", 8),
        Flabby => ("flabby", 12),
        Triangulate { .. } => ("triangulate", 24),
        SynthesizeGrammar { .. } => ("synthesize-grammar", 8),
        Theorem1Check => ("theorem1-check", 10),
        Theorem2Check => ("theorem2-check", 8),
        Columns { .. } => ("columns", 6),
        Comparator { .. } => ("comparator", 5),
        Theorem3Pipeline { .. } => ("theorem3-pipeline", 5),
        SigmaStarRoundtrip => ("sigma-star-roundtrip", 8),
    };
    let cfg = ExperimentConfig::resolve(name, &cli.common, default_maxlen)?;
    match &cli.command {
        TableEnum => experiments::table_enum(&cfg),
        TableFsaCheck => experiments::table_fsa_check(&cfg),
        Flabby => experiments::flabby(&cfg),
        Triangulate { cycle, count } => experiments::triangulate(&cfg, cycle.as_deref(), *count),
        SynthesizeGrammar { irreducible } => experiments::synthesize_grammar(&cfg, *irreducible),
        Theorem1Check => experiments::theorem1_check(&cfg),
        Theorem2Check => experiments::theorem2_check(&cfg),
        Columns { element } => experiments::columns(&cfg, element.as_deref()),
        Comparator { letter } => experiments::comparator(&cfg, letter.as_deref()),
        Theorem3Pipeline { grammars, refine } => experiments::theorem3_pipeline(&cfg, grammars.as_deref(), *refine),
        SigmaStarRoundtrip => experiments::sigma_star_roundtrip(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| r.emit().map(|()| r)) {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(report) => {
            for c in report.counterexamples.iter().take(10) {
                eprintln!("counterexample: {c}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("budget exhausted: {m}");
            ExitCode::from(3)
        }
    }
}
