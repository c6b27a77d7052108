use std::path::PathBuf;

use anyhow::Context as _;
use serde::Serialize;

use numsparse::hard::{build_hard_matrix, predicted_row_sparsity, sparsity_necessity_probe};
use numsparse::{matrix_ns, numerical_sparsity};

use super::Context;
use crate::report::RunReport;
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Matrix order (power of two).
    #[arg(long)]
    pub n: usize,
    /// Hadamard order (power of two dividing n, n/k ≥ 2).
    #[arg(long)]
    pub k: usize,
    /// Tail decay; defaults to 1/log₂(1/ε).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Error level the probe threshold s* is reported for.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Row sparsities to probe (default 0..=n).
    #[arg(long, value_delimiter = ',')]
    pub s_grid: Option<Vec<usize>>,
    /// Write A′ here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(ctx: &Context, args: &Args) -> anyhow::Result<Outcome> {
    if !(args.eps > 0.0 && args.eps < 1.0) {
        anyhow::bail!("--eps must be in (0, 1), got {}", args.eps);
    }
    if args.k == 0 || args.n % args.k != 0 || args.n / args.k < 2 {
        anyhow::bail!(
            "k must divide n with m = n/k ≥ 2 (got n={}, k={}, m={})",
            args.n,
            args.k,
            if args.k == 0 { 0 } else { args.n / args.k }
        );
    }
    let alpha = args.alpha.unwrap_or_else(|| 1.0 / (1.0 / args.eps).log2());
    let inst = build_hard_matrix(args.n, args.k, alpha)?;
    let grid: Vec<usize> = args.s_grid.clone().unwrap_or_else(|| (0..=args.n).collect());
    let probe = sparsity_necessity_probe(&inst, args.eps, &grid)?;
    let predicted = predicted_row_sparsity(args.k, args.eps);

    let mut report = RunReport::new("hardinstance", ctx.seed, args);
    report.metric("alpha", alpha);
    report.count("m", inst.m);
    report.count("nnz", numsparse::MatrixLike::nnz(&inst.aprime));
    report.metric("sigma", inst.spectral_norm());
    report.metric("ns", matrix_ns(&inst.aprime));
    report.metric("ns_tail_vector", numerical_sparsity(&inst.a)?);
    report.metric("predicted_row_sparsity", predicted);
    match probe.s_star {
        Some(s) => {
            report.count("s_star", s);
            report.metric("s_star_over_predicted", s as f64 / predicted);
        }
        None => report.note("no grid value reaches the ε target"),
    }
    report.detail("probe", &probe.points);
    if let Some(path) = &args.out {
        numsparse::mtx::save_matrix_market(&inst.aprime, path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome::ok(report))
}
