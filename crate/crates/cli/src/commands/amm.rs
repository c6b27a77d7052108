use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use numsparse::amm::{amm_frobenius, amm_spectral, AmmReport, ErrorNorm};
use numsparse::montecarlo::{run_trials, success_fraction, MeanSe};
use numsparse::oracle::difference_norm;
use numsparse::{spectral_norm_estimate, DenseMatrix, MatrixLike, PowerOptions};

use super::{check_eps, elapsed_ms, load_matrix, Context};
use crate::report::RunReport;
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Left factor A (m × n, MatrixMarket).
    #[arg(long)]
    pub a: PathBuf,
    /// Right factor B (n × p, MatrixMarket).
    #[arg(long)]
    pub b: PathBuf,
    /// Target relative error ε ∈ (0, 1/2].
    #[arg(long)]
    pub eps: f64,
    /// Error norm the guarantee is stated in.
    #[arg(long, default_value = "frobenius")]
    pub norm: ErrorNorm,
    /// Additional independent estimates for error statistics.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// Spectral: ≥ 90% of trials within ε. Frobenius: mean error ≤ ε.
    #[arg(long)]
    pub check: bool,
}

pub fn run(ctx: &Context, args: &Args) -> anyhow::Result<Outcome> {
    check_eps(args.eps, 0.5, true)?;
    let a = load_matrix(&args.a)?;
    let b = load_matrix(&args.b)?;
    if a.cols() != b.rows() {
        anyhow::bail!("inner dimensions differ: A is {}x{}, B is {}x{}", a.rows(), a.cols(), b.rows(), b.cols());
    }
    let mut report = RunReport::new("amm", ctx.seed, args);
    let exact = DenseMatrix::from(&a).matmul(&DenseMatrix::from(&b))?;
    let sa = spectral_norm_estimate(&a, PowerOptions::default(), ctx.seed)?.sigma;
    let sb = spectral_norm_estimate(&b, PowerOptions::default(), ctx.seed ^ 1)?.sigma;
    let scale = match args.norm {
        ErrorNorm::Spectral => sa * sb,
        ErrorNorm::Frobenius => a.frobenius() * b.frobenius(),
    };
    if args.norm == ErrorNorm::Spectral {
        report.note(ctx.constants_note());
    }
    let consts = ctx.constants.spectral_amm();
    let estimate = |seed: u64| -> anyhow::Result<AmmReport> {
        Ok(match args.norm {
            ErrorNorm::Spectral => {
                if sa == 0.0 || sb == 0.0 {
                    anyhow::bail!("spectral AMM needs nonzero A and B");
                }
                amm_spectral(&a, &b, args.eps, sa, sb, &consts, seed)?
            }
            ErrorNorm::Frobenius => amm_frobenius(&a, &b, args.eps, seed)?,
        })
    };
    let error = |c: &DenseMatrix, seed: u64| -> anyhow::Result<f64> {
        let d = match args.norm {
            ErrorNorm::Spectral => difference_norm(&exact, c, seed)?.0,
            ErrorNorm::Frobenius => exact.sub(c)?.frobenius(),
        };
        Ok(if scale > 0.0 { d / scale } else { 0.0 })
    };

    let start = Instant::now();
    let rep = estimate(ctx.seed)?;
    report.time("amm_ms", elapsed_ms(start));
    let err = error(&rep.product, ctx.seed)?;
    report.count("pairs_sampled", rep.pairs_sampled);
    report.count("entry_samples", rep.entry_samples);
    let key = match args.norm {
        ErrorNorm::Spectral => "spectral_error",
        ErrorNorm::Frobenius => "frobenius_error",
    };
    report.metric(key, err);
    let mut passed = err <= args.eps;

    if args.trials > 0 {
        let errs = run_trials(ctx.seed, args.trials, |_, s| error(&estimate(s)?.product, s));
        let errs: Vec<f64> = errs.into_iter().collect::<anyhow::Result<_>>()?;
        let ok: Vec<bool> = errs.iter().map(|&e| e <= args.eps).collect();
        let stats = MeanSe::of(&errs);
        report.metric(&format!("mean_{key}"), stats.mean);
        report.metric(&format!("se_{key}"), stats.se);
        report.metric("success_fraction", success_fraction(&ok));
        report.count("trials", args.trials);
        passed = match args.norm {
            ErrorNorm::Spectral => success_fraction(&ok) >= super::sparsify::SUCCESS_TARGET,
            ErrorNorm::Frobenius => stats.mean <= args.eps,
        };
    }
    report.flag("check_passed", passed);
    Ok(Outcome { report, passed: passed || !args.check })
}
