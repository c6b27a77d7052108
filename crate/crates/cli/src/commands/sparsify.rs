use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context as _;
use clap::ValueEnum;
use serde::Serialize;

use numsparse::montecarlo::{run_trials, success_fraction, MeanSe};
use numsparse::oracle::difference_norm;
use numsparse::sparsify::{l1_row_budget, sparsify_l1_rows, HybridSparsifier, SampleConfig};
use numsparse::{profile, MatrixLike, PowerOptions, SparseMatrix};

use super::{check_eps, elapsed_ms, load_matrix, Context};
use crate::report::RunReport;
use crate::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Hybrid ℓ1 / row / column distribution, keep-or-drop per entry.
    Hybrid,
    /// ℓ1 sampling with a fixed number of draws per row.
    L1Rows,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Input matrix (MatrixMarket coordinate real general).
    #[arg(long)]
    pub a: PathBuf,
    /// Target relative spectral error ε ∈ (0, 1).
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "hybrid")]
    pub scheme: Scheme,
    /// Explicit budget: `s` for hybrid, draws per row for l1-rows.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Additional independent samples for error statistics.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// Exit 2 unless the spectral-error target is met (≥ 90% of trials
    /// with --trials, else the single sample).
    #[arg(long)]
    pub check: bool,
    /// Write the sampled matrix here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const SUCCESS_TARGET: f64 = 0.9;

fn sampler<'a>(
    ctx: &Context,
    args: &Args,
    a: &'a SparseMatrix,
    report: &mut RunReport,
) -> anyhow::Result<Box<dyn Fn(u64) -> anyhow::Result<SparseMatrix> + Sync + Send + 'a>> {
    match args.scheme {
        Scheme::Hybrid => {
            let mut cfg = SampleConfig::new(args.eps, ctx.constants.c_over, ctx.seed);
            if let Some(s) = args.budget {
                cfg = cfg.with_budget(s);
            }
            let prof = profile(a, PowerOptions::default().tol, ctx.seed)?;
            let sp = HybridSparsifier::with_profile(a, &prof, &cfg)?;
            report.metric("budget_s", sp.budget().s);
            report.metric("expected_nnz", sp.expected_nnz());
            report.metric("ns", prof.ns);
            report.metric("sr", prof.sr.unwrap_or(f64::NAN));
            report.metric("sigma_estimate", prof.sigma);
            Ok(Box::new(move |seed| Ok(sp.sample(seed))))
        }
        Scheme::L1Rows => {
            let ns = numsparse::matrix_ns(a);
            let s = match args.budget {
                Some(b) if b >= 0.0 && b.is_finite() => b.ceil() as usize,
                Some(b) => anyhow::bail!("--budget must be a nonnegative count, got {b}"),
                None => l1_row_budget(ns, a.rows(), a.cols(), args.eps, ctx.constants.c_l1),
            };
            report.count("draws_per_row", s);
            report.metric("ns", ns);
            Ok(Box::new(move |seed| Ok(sparsify_l1_rows(a, s, seed)?)))
        }
    }
}

pub fn run(ctx: &Context, args: &Args) -> anyhow::Result<Outcome> {
    check_eps(args.eps, 1.0, true)?;
    let a = load_matrix(&args.a)?;
    let mut report = RunReport::new("sparsify", ctx.seed, args);
    report.note(ctx.constants_note());
    let sigma = numsparse::spectral_norm_estimate(&a, PowerOptions::default(), ctx.seed)?.sigma;
    report.count("input_nnz", a.nnz());

    let start = Instant::now();
    let sample = sampler(ctx, args, &a, &mut report)?;
    let out = sample(ctx.seed)?;
    report.time("sample_ms", elapsed_ms(start));

    // relative errors; zero input gives 0 error
    let rel = |d: f64| if sigma > 0.0 { d / sigma } else { 0.0 };
    let (dist, exact) = difference_norm(&a, &out, ctx.seed)?;
    if !exact {
        report.note("spectral error from the power method (matrix exceeds dense-oracle scale)");
    }
    report.count("nnz", out.nnz());
    report.count("max_row_nnz", out.max_row_nnz());
    report.metric("spectral_error", rel(dist));
    let frob_a = a.frobenius();
    let diff_f = frobenius_distance(&a, &out)?;
    report.metric("frobenius_error", if frob_a > 0.0 { diff_f / frob_a } else { 0.0 });
    let mut passed = rel(dist) <= args.eps;

    if args.trials > 0 {
        let results = run_trials(ctx.seed, args.trials, |_, s| -> anyhow::Result<(f64, usize)> {
            let p = sample(s)?;
            Ok((rel(difference_norm(&a, &p, s)?.0), p.nnz()))
        });
        let results: Vec<(f64, usize)> = results.into_iter().collect::<anyhow::Result<_>>()?;
        let errors: Vec<f64> = results.iter().map(|r| r.0).collect();
        let nnz: Vec<f64> = results.iter().map(|r| r.1 as f64).collect();
        let ok: Vec<bool> = errors.iter().map(|&e| e <= args.eps).collect();
        let frac = success_fraction(&ok);
        let err = MeanSe::of(&errors);
        report.metric("success_fraction", frac);
        report.metric("mean_spectral_error", err.mean);
        report.metric("mean_nnz", MeanSe::of(&nnz).mean);
        report.count("trials", args.trials);
        passed = frac >= SUCCESS_TARGET;
    }
    if let Some(path) = &args.out {
        numsparse::mtx::save_matrix_market(&out, path).with_context(|| format!("writing {}", path.display()))?;
    }
    report.flag("check_passed", passed);
    Ok(Outcome { report, passed: passed || !args.check })
}

fn frobenius_distance(a: &SparseMatrix, b: &SparseMatrix) -> anyhow::Result<f64> {
    let mut entries: Vec<(usize, usize, f64)> = a.entries().to_vec();
    entries.extend(b.entries().iter().map(|&(i, j, v)| (i, j, -v)));
    Ok(SparseMatrix::from_triplets_summed(a.rows(), a.cols(), entries)?.frobenius())
}
