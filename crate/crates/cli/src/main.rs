//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 2 inadmissible parameters, 3 no convergence,
//! 64 bad usage, 1 any other failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use boussinesq_mild::Error;
use clap::{Args, Parser, Subcommand};

use config::{DataSpec, Horizon, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Inadmissible { r: f64, s: f64 },
    /// Already reported; carries the summary that was written.
    NotConverged(String),
    Io(String),
    Library(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Inadmissible { r, s } => Self::Inadmissible { r, s },
            Error::InvalidConfig(m) | Error::InvalidGrid(m) => Self::Usage(m),
            other => Self::Library(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 64,
            Self::Inadmissible { .. } => 2,
            Self::NotConverged(_) => 3,
            Self::Library(Error::NoAdmissibleT { .. }) => 3,
            Self::Io(_) | Self::Library(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Inadmissible { r, s } => write!(f, "(r, s) = ({r}, {s}) is not admissible"),
            Self::NotConverged(m) => write!(f, "{m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
            Self::Library(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "boussinesq", version, about = "Mild solutions of the 3D viscous Boussinesq system on a periodic box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a regularity pair (r, s).
    Admissibility {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Solve by Picard iteration and write norm time series.
    Solve(RunArgs),
    /// Per-iteration history of the Picard iteration.
    PicardDiagnostics(RunArgs),
    /// Randomized checks of the smoothing and product estimates.
    Verify(VerifyArgs),
    /// Energy functionals of a perturbed pair of solutions.
    Uniqueness(UniquenessArgs),
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// JSON configuration document; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    /// Grid points per axis (even).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    box_length: Option<f64>,
    /// Horizon, or "auto" for the ladder search.
    #[arg(long = "T", alias = "horizon")]
    horizon: Option<Horizon>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Initial data as JSON, e.g. '{"kind": "single_mode", "parameters": {"mode": [1, 0, 0]}}'.
    #[arg(long, value_parser = parse_data)]
    data: Option<DataSpec>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON summary destination; defaults to the CSV path with a .json
    /// extension, or stderr.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Fixed-order reductions, for byte-identical reruns.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Clone)]
struct UniquenessArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Size of the data perturbation.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Estimate to check (repeatable); see `commands::ESTIMATE_LABELS`.
    #[arg(long = "estimate", required_unless_present = "all", conflicts_with = "all")]
    estimates: Vec<String>,
    /// Every verifier at its standard instances.
    #[arg(long)]
    all: bool,
    #[arg(long, allow_hyphen_values = true)]
    s1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s2: Option<f64>,
}

fn parse_data(text: &str) -> Result<DataSpec, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, CliError> {
        let doc = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            r: self.r,
            s: self.s,
            n: self.n,
            box_length: self.box_length,
            horizon: self.horizon,
            steps: self.steps,
            max_iter: self.max_iter,
            tol: self.tol,
            seed: self.seed,
            trials: self.trials,
            data: self.data.clone(),
            output: self.output.clone(),
            deterministic_reductions: self.deterministic.then_some(true),
            eps: None,
        };
        Ok(doc.overlay(flags))
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(text) = std::env::var("BOUSSINESQ_THREADS") {
        let threads: usize = text
            .parse()
            .map_err(|_| CliError::Usage(format!("BOUSSINESQ_THREADS must be a positive integer, got {text:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Admissibility { r, s, format } => commands::admissibility(r, s, matches!(format, Format::Json)),
        Command::Solve(args) => commands::solve(args.config()?, args.summary.as_deref(), commands::SolveView::Series),
        Command::PicardDiagnostics(args) => {
            commands::solve(args.config()?, args.summary.as_deref(), commands::SolveView::Iterations)
        }
        Command::Verify(args) => {
            let selection = if args.all { None } else { Some(args.estimates.clone()) };
            commands::verify(args.run.config()?, args.run.summary.as_deref(), selection, args.s1, args.s2)
        }
        Command::Uniqueness(args) => {
            let mut cfg = args.run.config()?;
            if args.eps.is_some() {
                cfg.eps = args.eps;
            }
            commands::uniqueness(cfg, args.run.summary.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
