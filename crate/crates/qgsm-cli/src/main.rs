//! Command-line front end: scenario execution, Monte Carlo studies, fixture
//! replays and statistics aggregation. Outputs are transcripts, CSV tables
//! and plain-text summaries; every artifact carries its (seed, config hash)
//! header, so a rerun reproduces it byte-for-byte.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
    Text,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments: exit code 2.
    Config(String),
    /// Anything that failed mid-run: exit code 1.
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<qgsm::Error> for CliError {
    fn from(e: qgsm::Error) -> Self {
        match e {
            qgsm::Error::Config(_)
            | qgsm::Error::EveBothChannels
            | qgsm::Error::ContractOutOfRange { .. } => CliError::Config(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qgsm",
    about = "Simulator for quantum SIM-card authentication protocols",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; omitted fields take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trial count (overrides the config file).
    #[arg(long, global = true)]
    trials: Option<u32>,

    /// Output directory for artifacts.
    #[arg(long, default_value = "runs", global = true)]
    out: PathBuf,

    /// Stdout summary format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Suppress stdout (artifacts are still written).
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Three-particle protocol scenarios (solo, simultaneous, eavesdrop,
    /// relay) with clone-detection statistics.
    Tri,
    /// Quantum-memory challenge/response runs, attack comparisons and the
    /// match-count histogram.
    Qmem,
    /// Two-party Bell-pair reference mode.
    E91,
    /// CNOT eavesdropping study on one channel.
    Attack,
    /// Replays the pinned worked examples and reports pass/fail.
    Fixtures,
    /// Aggregates verdict records from prior runs under --out.
    Stats,
}

fn load_config<T: serde::de::DeserializeOwned + Default>(path: Option<&PathBuf>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let body = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&body).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let output = Output {
        quiet: cli.quiet,
        format: cli.format,
    };
    match cli.command {
        Command::Tri => {
            let mut config: config::TriRunConfig = load_config(cli.config.as_ref())?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(trials) = cli.trials {
                config.trials = trials;
            }
            commands::cmd_tri(&config, &cli.out, &output)
        }
        Command::Qmem => {
            let mut config: config::QmemRunConfig = load_config(cli.config.as_ref())?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(trials) = cli.trials {
                config.trials = trials;
            }
            commands::cmd_qmem(&config, &cli.out, &output)
        }
        Command::E91 => {
            let mut config: config::E91RunConfig = load_config(cli.config.as_ref())?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            commands::cmd_e91(&config, &cli.out, &output)
        }
        Command::Attack => {
            let mut config: config::AttackRunConfig = load_config(cli.config.as_ref())?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(trials) = cli.trials {
                config.trials = trials;
            }
            commands::cmd_attack(&config, &cli.out, &output)
        }
        Command::Fixtures => commands::cmd_fixtures(&output),
        Command::Stats => commands::cmd_stats(&cli.out, &output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
