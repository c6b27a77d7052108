use std::path::PathBuf;

use serde::Serialize;

use numsparse::calibrate::{calibrate, CalibrationOptions, Sweep};

use super::Context;
use crate::report::RunReport;
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Trials per (family, ε, constant) cell; at least 100.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Error levels every candidate must pass.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25")]
    pub eps: Vec<f64>,
    /// Required success rate.
    #[arg(long, default_value_t = 0.9)]
    pub target: f64,
    /// Candidate constants, ascending (default 2^-10 … 2^4 in √2 steps).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Where to write the constants.
    #[arg(long, default_value = "constants.json")]
    pub out: PathBuf,
}

fn summarize(report: &mut RunReport, name: &str, sweep: &Sweep) {
    match sweep.chosen {
        Some(c) => report.metric(name, c),
        None => {
            if let Some(best) = sweep.best() {
                report.note(format!(
                    "{name}: no grid value met the target; best c = {} with worst-case success {}",
                    best.c, best.min_success
                ));
            }
        }
    }
    if let Some(last) = sweep.points.last() {
        report.metric(&format!("{name}_success"), last.min_success);
    }
    report.detail(name, sweep);
}

pub fn run(ctx: &Context, args: &Args) -> anyhow::Result<Outcome> {
    let mut opts =
        CalibrationOptions { trials: args.trials, eps: args.eps.clone(), target: args.target, ..Default::default() };
    if let Some(grid) = &args.grid {
        if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) || grid[0] <= 0.0 {
            anyhow::bail!("--grid must be positive and strictly ascending");
        }
        opts.grid = grid.clone();
    }
    if ctx.seed_given {
        opts.seed = ctx.seed;
    }
    let out = calibrate(&opts)?;
    let mut report = RunReport::new("calibrate", opts.seed, args);
    report.seed = opts.seed;
    summarize(&mut report, "c_over", &out.hybrid);
    summarize(&mut report, "c_l1", &out.l1_rows);
    match &out.amm_spectral {
        Some(s) => summarize(&mut report, "c_mz", s),
        None => report.note("c_mz not calibrated: c_l1 sweep failed"),
    }
    match &out.constants {
        Some(c) => {
            c.save(&args.out)?;
            report.note(format!("wrote {}", args.out.display()));
            Ok(Outcome::ok(report))
        }
        None => Ok(Outcome { report, passed: false }),
    }
}
