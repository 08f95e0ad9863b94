//! `ioncat`: run cat-state protocols, the oracle suite, parameter sweeps and
//! Wigner grids from the command line.
//!
//! Exit codes: 0 success, 1 failure (including failed validation), 2 invalid
//! input or configuration, 3 Fock-space truncation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use config::OutputFormat;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Engine(ioncat::Error),
    Io(String),
    Failed(String),
}

impl From<ioncat::Error> for CliError {
    fn from(e: ioncat::Error) -> Self {
        CliError::Engine(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use ioncat::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Engine(E::Truncation { .. }) => 3,
            CliError::Engine(E::InvalidInput(_) | E::UnsupportedOrder { .. } | E::TooManyIons { .. }) => 2,
            CliError::Engine(_) | CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "ioncat", version, about = "Collective-motion cat states of trapped ions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol from a JSON config; writes result and optional Wigner grid.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        /// Sampler seed (overrides `seed`).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare engine pulses with full-space integration on random draws.
    Validate {
        /// N <= 2, one draw per order.
        #[arg(long)]
        quick: bool,
        /// Feed the engine the wrong displacement sign; the run must fail.
        #[arg(long)]
        negative_control: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep one parameter (n_ions, alpha, eta or delta) of a base run.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Wigner grid of a saved motional state or protocol branch.
    Wigner {
        /// `result.json` from simulate, or a motional state file.
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "all_excited")]
        branch: String,
        #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "POINTS"], allow_negative_numbers = true)]
        x: Option<Vec<f64>>,
        #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "POINTS"], allow_negative_numbers = true)]
        p: Option<Vec<f64>>,
        /// Points per axis when the range is chosen automatically.
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out, format, seed } => {
            commands::simulate(commands::SimulateArgs { config, out, format, seed })
        }
        Command::Validate { quick, negative_control, seed } => {
            commands::validate(commands::ValidateArgs { quick, negative_control, seed })
        }
        Command::Sweep { config, out, jobs, format, seed } => {
            commands::sweep(commands::SweepArgs { config, out, jobs, format, seed })
        }
        Command::Wigner { state, branch, x, p, points, out, format } => {
            commands::wigner_cmd(commands::WignerArgs { state, branch, x, p, points, out, format })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
