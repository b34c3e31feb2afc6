//! `sgdlab` — batch front-end for SGD convergence experiments.
//!
//! Subcommands: `run`, `sweep`, `verify-recursion`, `check-oracle`, `bound`.
//! Exit codes: 0 all checks pass, 1 usage or configuration error, 2 bound
//! violation, 3 internal numeric failure.

// `!(x > 0)` guards reject NaN; keep them (see the core crate).
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    BoundViolation(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 1,
            CliError::BoundViolation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Maps a core error out of oracle construction / campaign execution.
    /// Inner-solver and eigensolver failures are numeric (exit 3); parameter
    /// problems are configuration errors (exit 1).
    pub fn numeric(e: sgdlab::Error) -> CliError {
        match e {
            sgdlab::Error::SolverDidNotConverge(_) => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::BoundViolation(m) => write!(f, "bound violation: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sgdlab",
    version,
    about = "SGD convergence experiments and recursion-bound verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run replicate campaigns per (problem, schedule, horizon) cell and
    /// check measured metrics against the theoretical bounds.
    Run(CampaignArgs),
    /// Like `run`, but purely informational: emits curve data and never
    /// fails on bound comparisons.
    Sweep(CampaignArgs),
    /// Randomized verification of the recursion lemmas over a parameter grid.
    VerifyRecursion(CampaignArgs),
    /// Validate oracle assumptions (second moment, mu-convexity) at random
    /// query points.
    CheckOracle(CampaignArgs),
    /// Print every bound formula for given constants.
    Bound(BoundArgs),
}

#[derive(Args, Debug)]
struct CampaignArgs {
    /// Campaign configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Quasi-convexity modulus mu.
    #[arg(long)]
    mu: f64,
    /// Smoothness constant L.
    #[arg(long)]
    l: f64,
    /// Initial distance R = ||x0 - x*||.
    #[arg(long)]
    r: f64,
    /// Oracle noise floor sigma^2.
    #[arg(long, default_value_t = 0.0)]
    sigma2: f64,
    /// Horizon T.
    #[arg(long)]
    t: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("usage error: {e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run(args) => commands::run_campaigns(&load(&args)?, false),
        Cmd::Sweep(args) => commands::run_campaigns(&load(&args)?, true),
        Cmd::VerifyRecursion(args) => commands::verify_recursion(&load(&args)?),
        Cmd::CheckOracle(args) => commands::check_oracle(&load(&args)?),
        Cmd::Bound(args) => commands::print_bounds(args.mu, args.l, args.r, args.sigma2, args.t),
    }
}

/// A fully resolved campaign: config plus flag overrides.
pub struct Resolved {
    pub config: config::ExperimentConfig,
    pub out: PathBuf,
}

fn load(args: &CampaignArgs) -> Result<Resolved, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = config::ExperimentConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if args.workers > 0 {
        config.workers = args.workers;
    }
    if config.workers > 0 {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build_global();
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("results.csv"));
    Ok(Resolved { config, out })
}
