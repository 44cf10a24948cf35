//! `lepage`: decide variationality of second-order ODE systems and build
//! their Lagrangians.

mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lepage_core::numeric::SamplePlan;
use lepage_core::system::SystemFile;
use lepage_core::{Error, Rational};
use rayon::prelude::*;

use report::Outcome;

#[derive(Parser, Debug)]
#[command(name = "lepage", version, about = "Inverse variational problem for autonomous second-order ODE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample points per numeric check.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Relative tolerance of numeric zero tests.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Homogeneity degree to certify instead of probing, e.g. `2` or `3/2`.
    #[arg(long, global = true)]
    degree: Option<String>,
    /// Keep non-polynomial integrals as quadrature nodes.
    #[arg(long, global = true)]
    numeric_fallback: bool,
    /// Run the command on every `*.sys` file of a directory.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Helmholtz conditions, homogeneity and the obstruction ω.
    Check { file: Option<PathBuf> },
    /// Construct a Lagrangian.
    Lagrangian {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Print α_ε, α₀, α′, μ₀, ω, κ and verify the decomposition.
    Forms { file: Option<PathBuf> },
    /// Compare ω and κ across the charts declared in the file.
    Invariance { file: Option<PathBuf> },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Tonti,
    Tonti1,
    Global,
    Auto,
}

impl Command {
    fn file(&self) -> Option<&Path> {
        match self {
            Command::Check { file } | Command::Lagrangian { file, .. } | Command::Forms { file } | Command::Invariance { file } => {
                file.as_deref()
            }
        }
    }
}

/// Settings shared by every command after flags override the file.
pub struct Settings {
    pub plan: SamplePlan,
    pub degree: Option<Rational>,
    pub numeric_fallback: bool,
}

fn settings(cli: &Cli, system: &SystemFile) -> Result<Settings, Error> {
    let mut plan = system.plan();
    if let Some(seed) = cli.seed {
        plan.seed = seed;
    }
    if let Some(trials) = cli.trials {
        plan.trials = trials;
    }
    if let Some(tol) = cli.tol {
        plan.tol = tol;
    }
    plan.validate()?;
    let degree = match &cli.degree {
        Some(text) => Some(Rational::from_str(text).map_err(|_| Error::Validation(format!("bad degree `{text}`")))?),
        None => system.degree.clone(),
    };
    Ok(Settings { plan, degree, numeric_fallback: cli.numeric_fallback || system.numeric_fallback })
}

fn run_file(cli: &Cli, path: &Path) -> Outcome {
    let start = Instant::now();
    let result = SystemFile::read(path).and_then(|system| {
        let s = settings(cli, &system)?;
        match &cli.command {
            Command::Check { .. } => report::check(&system, &s),
            Command::Lagrangian { method, .. } => report::lagrangian(&system, &s, *method),
            Command::Forms { .. } => report::forms(&system, &s),
            Command::Invariance { .. } => report::invariance(&system, &s),
        }
    });
    let mut outcome = result.unwrap_or_else(Outcome::from_error);
    outcome.set_file(path);
    outcome.elapsed_ms = start.elapsed().as_millis();
    outcome
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Validation(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> =
        entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "sys")).collect();
    files.sort();
    Ok(files)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcomes = match (&cli.corpus, cli.command.file()) {
        (Some(dir), _) => match corpus_files(dir) {
            Ok(files) => files.par_iter().map(|f| run_file(&cli, f)).collect(),
            Err(e) => vec![Outcome::from_error(e)],
        },
        (None, Some(file)) => vec![run_file(&cli, file)],
        (None, None) => vec![Outcome::from_error(Error::Validation("no system file given".into()))],
    };
    let code = outcomes.iter().map(|o| o.code).max().unwrap_or(0);
    let mut out = std::io::stdout().lock();
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = if cli.json {
        let doc = if cli.corpus.is_some() {
            serde_json::Value::Array(outcomes.iter().map(|o| o.json.clone()).collect())
        } else {
            outcomes[0].json.clone()
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("reports serialize"))
    } else {
        outcomes.iter().try_for_each(|o| writeln!(out, "{}elapsed     {} ms", o.text, o.elapsed_ms))
    };
    ExitCode::from(code)
}
