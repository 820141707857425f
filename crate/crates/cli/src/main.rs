#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit status 1: bad input. Exit status 2: a numerical check failed.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<sl_spectra::Error> for CliError {
    fn from(e: sl_spectra::Error) -> Self {
        use sl_spectra::Error as E;
        match e {
            E::Syntax { .. }
            | E::UnknownIdentifier { .. }
            | E::Differentiation(_)
            | E::InvalidInput(_)
            | E::GridMismatch
            | E::DecompositionMismatch
            | E::MissingDerivative(_)
            | E::BoundaryViolation { .. } => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sl-spectra",
    version,
    about = "Sturm-Liouville spectra, fractional spaces and modal simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Problem definition file (JSON).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in problem: dirichlet, neumann or dcr.
    #[arg(long)]
    pub preset: Option<String>,
    /// Diffusion coefficient of the dcr preset.
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// Kinetic constant of the dcr preset.
    #[arg(long)]
    pub k0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute eigenvalues and eigenfunctions.
    Eigs {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = sl_spectra::eigensolve::DEFAULT_MODES)]
        modes: usize,
        /// Output directory; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve an initial state with the modal semigroup.
    Simulate(commands::SimulateArgs),
    /// Boundary observability test for the dcr model.
    Observe(commands::ObserveArgs),
    /// Run seeded property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SL_SPECTRA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("SL_SPECTRA_THREADS must be a nonnegative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Eigs { problem, modes, out } => commands::eigs(&problem, modes, out),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Observe(args) => commands::observe(&args),
        Command::Verify { suite, seed, out } => commands::verify(&suite, seed, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Input(_) => ExitCode::from(1),
                CliError::Numerical(_) => ExitCode::from(2),
            }
        }
    }
}
