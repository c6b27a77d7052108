//! Browser demo: three small interactive experiments over `numsparse`.
//!
//! Every exported function takes plain numbers and returns a JSON string, so
//! the page needs no bindings beyond `wasm-bindgen`'s generated glue. The
//! same computations are exposed as ordinary Rust functions for native tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use numsparse::calibrate::Constants;
use numsparse::hard::{build_hard_matrix, predicted_row_sparsity, sparsity_necessity_probe};
use numsparse::oracle;
use numsparse::ridge::{
    build_preconditioner, cg_solve, precond_ridge_solve_with, ridge_exact, RidgeProblem, RidgeSolveOptions, StopRule,
};
use numsparse::sparsify::{HybridSparsifier, SampleConfig};
use numsparse::{DenseMatrix, MatrixLike, Result};

/// Largest side the page may request; keeps dense oracles interactive.
pub const MAX_DIM: usize = 128;

#[derive(Debug, Serialize)]
pub struct SparsifyView {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries of `A` and of one sample `Ã`.
    pub input: Vec<f64>,
    pub sample: Vec<f64>,
    pub input_nnz: usize,
    pub sample_nnz: usize,
    pub budget: f64,
    pub expected_nnz: f64,
    /// `‖A − Ã‖₂ / ‖A‖₂`, exact.
    pub relative_error: f64,
    pub eps: f64,
    pub c_over: f64,
}

fn demo_matrix(kind: &str, n: usize, seed: u64) -> Result<DenseMatrix> {
    match kind {
        "gaussian" => Ok(DenseMatrix::random_gaussian(n, n, seed)),
        "identity" => Ok(DenseMatrix::identity(n)),
        "hard" => Ok(build_hard_matrix(n, 4, 0.5)?.aprime),
        other => Err(numsparse::Error::InvalidArgument(format!("unknown matrix kind `{other}`"))),
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(numsparse::Error::InvalidArgument(format!("size must be in 1..={MAX_DIM}, got {n}")));
    }
    Ok(())
}

/// One hybrid sparsification of an `n × n` matrix of the given kind
/// (`gaussian`, `identity`, or `hard`, the circulant ⊗ H₄ instance).
pub fn sparsify_view(kind: &str, n: usize, eps: f64, seed: u64) -> Result<SparsifyView> {
    check_dim(n)?;
    let a = demo_matrix(kind, n, seed)?;
    let c_over = Constants::builtin().c_over;
    let sp = HybridSparsifier::new(&a, &SampleConfig::new(eps, c_over, seed))?;
    let p = sp.sample(seed);
    let sigma = oracle::spectral_norm(&a)?;
    let dist = oracle::spectral_distance(&a, &p)?;
    Ok(SparsifyView {
        rows: a.rows(),
        cols: a.cols(),
        input_nnz: a.nnz(),
        sample_nnz: p.nnz(),
        sample: p.to_dense().into_data(),
        input: a.into_data(),
        budget: sp.budget().s,
        expected_nnz: sp.expected_nnz(),
        relative_error: if sigma > 0.0 { dist / sigma } else { 0.0 },
        eps,
        c_over,
    })
}

#[derive(Debug, Serialize)]
pub struct ProbeView {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub eps: f64,
    /// `(s, lower bound on ‖A − B‖₂/‖A‖₂ for row sparsity s)`.
    pub curve: Vec<(usize, f64)>,
    pub s_star: Option<usize>,
    pub predicted: f64,
}

/// Row-sparsity necessity curve of the hard instance at `α = 1/log₂(1/ε)`.
pub fn probe_view(n: usize, k: usize, eps: f64) -> Result<ProbeView> {
    check_dim(n)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(numsparse::Error::InvalidArgument(format!("eps must be in (0, 1/2), got {eps}")));
    }
    let alpha = 1.0 / (1.0 / eps).log2();
    let inst = build_hard_matrix(n, k, alpha)?;
    let grid: Vec<usize> = (0..=n).collect();
    let rep = sparsity_necessity_probe(&inst, eps, &grid)?;
    Ok(ProbeView {
        n,
        k,
        alpha,
        eps,
        curve: rep.points.iter().map(|p| (p.s, p.lower_bound)).collect(),
        s_star: rep.s_star,
        predicted: predicted_row_sparsity(k, eps),
    })
}

#[derive(Debug, Serialize)]
pub struct ConvergenceView {
    pub kappa: f64,
    pub keep_fraction: f64,
    pub preconditioner_nnz: usize,
    pub input_nnz: usize,
    /// `‖xₜ − x*‖_M / ‖x₀ − x*‖_M` after `t` iterations, `t = 0, 1, …`.
    pub cg: Vec<f64>,
    pub pcg: Vec<f64>,
}

/// Energy-error curves of plain CG and sparsifier-preconditioned CG on a
/// seeded 64×16 ridge problem with `κ_λ = kappa`. `keep_fraction < 1` caps
/// the sample budget at that fraction of `nnz(A)`; otherwise the calibrated
/// budget is used.
pub fn convergence_view(kappa: f64, keep_fraction: f64, iterations: usize, seed: u64) -> Result<ConvergenceView> {
    if !(kappa >= 1.0 && kappa.is_finite()) || !(keep_fraction > 0.0) || iterations == 0 || iterations > 200 {
        return Err(numsparse::Error::InvalidArgument(
            "need kappa ≥ 1, keep_fraction > 0 and 1 ≤ iterations ≤ 200".into(),
        ));
    }
    let a = DenseMatrix::random_gaussian(64, 16, seed);
    let b = DenseMatrix::random_gaussian(64, 1, seed ^ 0xb).into_data();
    let sigma = oracle::spectral_norm(&a)?;
    let lambda = sigma * sigma / kappa;
    let prob = RidgeProblem::new(&a, b, lambda, None)?;
    let xs = ridge_exact(&prob)?;
    let e0 = prob.energy_distance(&prob.x0, &xs);
    let rel = |x: &[f64]| prob.energy_distance(x, &xs) / e0;

    let rhs = prob.rhs();
    let cg: Vec<f64> =
        (0..=iterations).map(|t| rel(&cg_solve(|x, y| prob.apply_normal(x, y), &rhs, None, 0.0, t).x)).collect();

    let mut cfg = SampleConfig::new(0.5, Constants::builtin().c_over, seed);
    if keep_fraction < 1.0 {
        cfg = cfg.with_budget(keep_fraction * a.nnz() as f64);
    }
    let pre = build_preconditioner(&a, lambda, 0.25, &cfg)?;
    let pcg = (0..=iterations)
        .map(|t| {
            let opts =
                RidgeSolveOptions { max_outer: t, stop: Some(StopRule::RelativeResidual(0.0)), ..Default::default() };
            Ok(rel(&precond_ridge_solve_with(&prob, &pre, 0.5, &opts)?.x))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConvergenceView { kappa, keep_fraction, preconditioner_nnz: pre.p.nnz(), input_nnz: a.nnz(), cg, pcg })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn sparsify(kind: &str, n: usize, eps: f64, seed: u32) -> std::result::Result<String, JsError> {
    to_js(sparsify_view(kind, n, eps, seed.into()))
}

#[wasm_bindgen]
pub fn hard_probe(n: usize, k: usize, eps: f64) -> std::result::Result<String, JsError> {
    to_js(probe_view(n, k, eps))
}

#[wasm_bindgen]
pub fn ridge_convergence(
    kappa: f64,
    keep_fraction: f64,
    iterations: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(convergence_view(kappa, keep_fraction, iterations, seed.into()))
}
