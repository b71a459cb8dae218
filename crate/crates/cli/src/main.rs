//! Batch front end: structured run configurations, parameter sweeps, and
//! deterministic machine-readable output for electron-photon sideband
//! spectra, cavity dynamics, and coupling estimates.

mod cavityqe;
mod config;
mod couple;
mod output;
mod retrieve;
mod spectrum;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

/// Failure classes mapped onto process exit codes: bad input exits 2,
/// a numerical breakdown exits 3.
#[derive(Debug)]
pub(crate) enum Failure {
    Validation(String),
    Numerical(String),
}

pub(crate) type RunResult<T> = Result<T, Failure>;

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<qpinem_core::Error> for Failure {
    fn from(err: qpinem_core::Error) -> Self {
        use qpinem_core::Error as E;
        match err {
            E::Numerics(_) | E::Integration(_) => Failure::Numerical(err.to_string()),
            _ => Failure::Validation(err.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qpinem",
    version,
    about = "Electron-photon sideband spectra, cavity dynamics, and coupling estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sideband probabilities P_l for one statistics over a coupling grid
    Spectrum(RunArgs),
    /// Integrated gain/loss ratio over an (nbar, |beta0|) grid
    Fig1(RunArgs),
    /// Long-format spectra over a statistics x coupling grid
    Sweep(RunArgs),
    /// Cavity fed by N pumped emitters: trajectory and electron spectra
    CavityQe(RunArgs),
    /// Physical estimates: dipole, eels, ellipsoid, shell, purcell, saturation
    Coupling(RunArgs),
    /// g^(l) retrieval from a sideband table
    Retrieve(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory, created if missing
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Output file format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Solver tolerance, overriding the config value
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("qpinem: error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn dispatch(cli: Cli) -> RunResult<Vec<PathBuf>> {
    match cli.command {
        Command::Spectrum(args) => {
            let (ctx, cfg) = config::load::<config::SpectrumConfig>(&args)?;
            spectrum::run_spectrum(&ctx, &cfg)
        }
        Command::Fig1(args) => {
            let (ctx, cfg) = config::load::<config::Fig1Config>(&args)?;
            spectrum::run_fig1(&ctx, &cfg)
        }
        Command::Sweep(args) => {
            let (ctx, cfg) = config::load::<config::SweepConfig>(&args)?;
            spectrum::run_sweep(&ctx, &cfg)
        }
        Command::CavityQe(args) => {
            let (ctx, cfg) = config::load::<config::CavityQeConfig>(&args)?;
            cavityqe::run_cavity_qe(&ctx, &cfg)
        }
        Command::Coupling(args) => {
            let (ctx, cfg) = config::load::<config::CouplingConfig>(&args)?;
            couple::run_coupling(&ctx, &cfg)
        }
        Command::Retrieve(args) => {
            let (ctx, cfg) = config::load::<config::RetrieveConfig>(&args)?;
            retrieve::run_retrieve(&ctx, &cfg)
        }
    }
}
