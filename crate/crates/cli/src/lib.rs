//! `numsparse` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 a `--check` gate (or
//! calibration) failed.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod report;

use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "numsparse", version, about = "Numerical-sparsity sampling, AMM and sparsified ridge regression")]
pub struct Cli {
    /// Root seed; every random stream derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Calibrated constants file ($NUMSPARSE_CONSTANTS takes precedence).
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entrywise sparsification of a MatrixMarket matrix.
    Sparsify(commands::sparsify::Args),
    /// Approximate matrix multiplication.
    Amm(commands::amm::Args),
    /// Sparsifier-preconditioned ridge regression.
    Ridge(commands::ridge::Args),
    /// Lower-bound instance and row-sparsity probe.
    Hardinstance(commands::hard::Args),
    /// Sweep the hidden sampling constants and write a constants file.
    Calibrate(commands::calibrate::Args),
    /// Time the main kernels on a seeded random matrix.
    Bench(commands::bench::Args),
}

/// Result of a subcommand: the report and whether its gate passed.
pub struct Outcome {
    pub report: RunReport,
    pub passed: bool,
}

impl Outcome {
    pub fn ok(report: RunReport) -> Self {
        Self { report, passed: true }
    }
}

pub fn execute(cli: &Cli) -> anyhow::Result<Outcome> {
    let ctx = commands::Context::new(cli)?;
    match &cli.command {
        Command::Sparsify(a) => commands::sparsify::run(&ctx, a),
        Command::Amm(a) => commands::amm::run(&ctx, a),
        Command::Ridge(a) => commands::ridge::run(&ctx, a),
        Command::Hardinstance(a) => commands::hard::run(&ctx, a),
        Command::Calibrate(a) => commands::calibrate::run(&ctx, a),
        Command::Bench(a) => commands::bench::run(&ctx, a),
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let text = outcome.report.to_string_pretty();
    match &cli.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write report {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    if outcome.passed {
        0
    } else {
        eprintln!("check failed");
        2
    }
}
