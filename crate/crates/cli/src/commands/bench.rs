use std::time::Instant;

use serde::Serialize;

use numsparse::amm::amm_frobenius;
use numsparse::rng::Seed;
use numsparse::sparsify::{l1_row_budget, sparsify_l1_rows, HybridSparsifier, SampleConfig};
use numsparse::{matrix_ns, profile, spectral_norm_estimate, MatrixLike, PowerOptions, SparseMatrix};
use rand::Rng;

use super::{elapsed_ms, Context};
use crate::report::RunReport;
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Square matrix order.
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    /// Fraction of nonzero entries.
    #[arg(long, default_value_t = 0.05)]
    pub density: f64,
    /// Error level for the timed samplers.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
}

/// Seeded sparse matrix with Bernoulli(density) support and Gaussian-ish values.
fn random_sparse(n: usize, density: f64, seed: u64) -> anyhow::Result<SparseMatrix> {
    let mut rng = Seed::new(seed).derive(numsparse::rng::stage::INSTANCE).rng();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.random::<f64>() < density {
                let v: f64 = rng.random::<f64>() * 2.0 - 1.0;
                entries.push((i, j, v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(n, n, entries)?)
}

pub fn run(ctx: &Context, args: &Args) -> anyhow::Result<Outcome> {
    if !(args.density > 0.0 && args.density <= 1.0) {
        anyhow::bail!("--density must be in (0, 1], got {}", args.density);
    }
    if !(args.eps > 0.0 && args.eps <= 0.5) {
        anyhow::bail!("--eps must be in (0, 1/2], got {}", args.eps);
    }
    let a = random_sparse(args.n, args.density, ctx.seed)?;
    let mut report = RunReport::new("bench", ctx.seed, args);
    report.note(ctx.constants_note());
    report.count("input_nnz", a.nnz());

    let t = Instant::now();
    let sigma = spectral_norm_estimate(&a, PowerOptions::default(), ctx.seed)?;
    report.time("power_method_ms", elapsed_ms(t));
    report.count("power_iterations", sigma.iterations);

    let t = Instant::now();
    let prof = profile(&a, PowerOptions::default().tol, ctx.seed)?;
    report.time("profile_ms", elapsed_ms(t));

    let cfg = SampleConfig::new(args.eps, ctx.constants.c_over, ctx.seed);
    let t = Instant::now();
    let sp = HybridSparsifier::with_profile(&a, &prof, &cfg)?;
    let hybrid = sp.sample(ctx.seed);
    report.time("hybrid_ms", elapsed_ms(t));
    report.count("hybrid_nnz", hybrid.nnz());
    report.metric("hybrid_budget_s", sp.budget().s);

    let s = l1_row_budget(matrix_ns(&a), a.rows(), a.cols(), args.eps, ctx.constants.c_l1);
    let t = Instant::now();
    let rows = sparsify_l1_rows(&a, s, ctx.seed)?;
    report.time("l1_rows_ms", elapsed_ms(t));
    report.count("l1_rows_nnz", rows.nnz());
    report.count("l1_draws_per_row", s);

    let at = a.transpose();
    let t = Instant::now();
    let amm = amm_frobenius(&a, &at, args.eps, ctx.seed)?;
    report.time("amm_frobenius_ms", elapsed_ms(t));
    report.count("amm_pairs", amm.pairs_sampled);
    Ok(Outcome::ok(report))
}
