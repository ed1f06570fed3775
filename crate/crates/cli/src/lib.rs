//! Command-line harness: reads a scenario, runs one study and writes a CSV
//! table with a JSON meta file next to it.

pub mod config;
pub mod error;
pub mod study;
pub mod table;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{BackendChoice, Overrides, Scenario};
pub use error::{CliError, Result};
pub use study::{run_study, Outcome, Study};
pub use table::{Cell, ResultTable, Written};

#[derive(Debug, Parser)]
#[command(name = "mfld", version, about = "Mean-field quantum spin studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendChoice>,

    /// Drop every N above this value.
    #[arg(long, global = true, value_name = "INT")]
    pub max_n: Option<usize>,

    /// BCH truncation order.
    #[arg(long, global = true, value_name = "INT")]
    pub trunc_k: Option<usize>,

    /// Seed for the multi-start optimizer.
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,

    /// Exit with status 4 unless every limit value is certified.
    #[arg(long, global = true)]
    pub certify: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// F_N(t) against the certified limit over the (t, N) grid.
    FnConverge,
    /// Quantization defect of the bracket, f = a_symbol, g = h_symbol.
    DgrScan,
    /// Majorant coefficients gamma(n) and the radius estimate.
    BchMajorant,
    /// Binned outcome distribution against the Legendre rate.
    Ldp,
    /// Mean-field free energies of h, a and h + t a.
    Variational,
    /// Golden-Thompson lower and upper sides over the (t, N) grid.
    GtGap,
    /// Dense and block F_N side by side.
    BackendCheck,
}

impl From<Command> for Study {
    fn from(c: Command) -> Self {
        match c {
            Command::FnConverge => Study::FnConverge,
            Command::DgrScan => Study::DgrScan,
            Command::BchMajorant => Study::BchMajorant,
            Command::Ldp => Study::Ldp,
            Command::Variational => Study::Variational,
            Command::GtGap => Study::GtGap,
            Command::BackendCheck => Study::BackendCheck,
        }
    }
}

impl Cli {
    pub fn scenario(&self) -> Result<Scenario> {
        let mut sc = match &self.config {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        sc.apply(&Overrides {
            out: self.out.clone(),
            backend: self.backend,
            max_n: self.max_n,
            trunc_k: self.trunc_k,
            seed: self.seed,
        });
        Ok(sc)
    }
}

/// Runs the selected study and writes its artifacts. A certification
/// failure is reported only after the files are on disk.
pub fn execute(cli: &Cli) -> Result<Written> {
    let sc = cli.scenario()?;
    let outcome = run_study(cli.command.into(), &sc, cli.certify)?;
    let written = outcome.table.write(&sc.output_dir)?;
    match outcome.uncertified {
        Some(msg) => Err(CliError::Certification(msg)),
        None => Ok(written),
    }
}
