use crate::error::{Error, Result};
use crate::matrix::{MatrixLike, SparseMatrix};
use crate::oracle;
use crate::power::PowerOptions;
use crate::rng::{stage, Seed};
use crate::sparsify::{HybridSparsifier, SampleConfig};
use crate::stats::profile;

use super::cg::{cg_solve, pcg_solve, StopRule};
use super::{apply_shifted_gram, RidgeProblem};

/// A sparsifier `P` of `A` at `ε = √λ · ε′ / ‖A‖₂`.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    pub p: SparseMatrix,
    pub eps_used: f64,
    pub eps_prime: f64,
    pub lambda: f64,
    /// Spectral-norm estimate used for `eps_used`.
    pub sigma: f64,
    /// `ε ≥ 1`: regularization dominates and `λI` alone preconditions.
    pub degenerate: bool,
}

impl Preconditioner {
    /// Upper bound on the condition number of `(PᵀP + λI)⁻¹(AᵀA + λI)` when
    /// the sparsifier meets its error target.
    pub fn condition_bound(&self) -> f64 {
        if self.degenerate {
            1.0 + self.sigma * self.sigma / self.lambda
        } else {
            (1.0 + 2.0 * self.eps_prime) / (1.0 - 2.0 * self.eps_prime)
        }
    }

    /// The premise `‖A − P‖₂ < ε‖A‖₂` written as an absolute bound: `√λ · ε′`.
    pub fn premise_bound(&self) -> f64 {
        self.lambda.sqrt() * self.eps_prime
    }
}

/// Builds `P` by hybrid sampling of `A` at `ε = √λ ε′ / σ`, with `σ` from the
/// power method (seeded by `cfg.seed`). `cfg.eps` is ignored; `cfg.c_over` and
/// `cfg.budget_override` apply.
pub fn build_preconditioner<M: MatrixLike>(
    a: &M,
    lambda: f64,
    eps_prime: f64,
    cfg: &SampleConfig,
) -> Result<Preconditioner> {
    if !(eps_prime > 0.0 && eps_prime < 0.5) {
        return Err(Error::InvalidArgument(format!("eps_prime must be in (0, 1/2), got {eps_prime}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be > 0, got {lambda}")));
    }
    let prof = profile(a, PowerOptions::default().tol, cfg.seed)?;
    let sigma = prof.sigma;
    let eps_used = if sigma > 0.0 { lambda.sqrt() * eps_prime / sigma } else { f64::INFINITY };
    let (p, degenerate) = if eps_used >= 1.0 {
        (SparseMatrix::empty(a.rows(), a.cols()), true)
    } else {
        let sample_cfg = SampleConfig { eps: eps_used, ..*cfg };
        let sp = HybridSparsifier::with_profile(a, &prof, &sample_cfg)?;
        (sp.sample(Seed::new(cfg.seed).derive(stage::HYBRID).value()), false)
    };
    Ok(Preconditioner { p, eps_used, eps_prime, lambda, sigma, degenerate })
}

/// Extreme eigenvalues `(lo, hi)` of `(PᵀP + λI)⁻¹ (AᵀA + λI)`, dense.
pub fn precond_quality<M: MatrixLike, N: MatrixLike>(a: &M, p: &N, lambda: f64) -> Result<(f64, f64)> {
    if a.rows() != p.rows() || a.cols() != p.cols() {
        return Err(Error::Shape("A and P must have equal shapes".into()));
    }
    let m = oracle::gram_shifted(a, lambda)?;
    let n = oracle::gram_shifted(p, lambda)?;
    oracle::generalized_eigen_range(&m, n)
}

#[derive(Debug, Clone, Copy)]
pub struct RidgeSolveOptions {
    pub eps_prime: f64,
    /// Relative residual target of every inner solve with `PᵀP + λI`.
    pub inner_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    /// Outer stopping rule. `None` targets the energy-error ratio `ε` passed
    /// to the solver.
    pub stop: Option<StopRule>,
}

impl Default for RidgeSolveOptions {
    fn default() -> Self {
        Self { eps_prime: 0.25, inner_tol: 1e-10, max_inner: 10_000, max_outer: 500, stop: None }
    }
}

#[derive(Debug, Clone)]
pub struct RidgeSolveOutcome {
    pub x: Vec<f64>,
    pub outer_iterations: usize,
    /// Inner CG iterations summed over all preconditioner applications.
    pub inner_iterations: usize,
    pub converged: bool,
    pub inner_all_converged: bool,
    pub relative_residual: f64,
    pub preconditioner_nnz: usize,
    pub eps_used: f64,
    pub degenerate: bool,
}

/// ε-approximate ridge solve: on exit `‖x̂ − x*‖_M ≤ ε ‖x0 − x*‖_M` with
/// `‖v‖_M = vᵀ(AᵀA + λI)v`, whenever the preconditioner meets its target.
pub fn precond_ridge_solve(prob: &RidgeProblem, eps: f64, cfg: &SampleConfig) -> Result<RidgeSolveOutcome> {
    let opts = RidgeSolveOptions::default();
    let pre = build_preconditioner(&prob.a, prob.lambda, opts.eps_prime, cfg)?;
    precond_ridge_solve_with(prob, &pre, eps, &opts)
}

pub fn precond_ridge_solve_with(
    prob: &RidgeProblem,
    pre: &Preconditioner,
    eps: f64,
    opts: &RidgeSolveOptions,
) -> Result<RidgeSolveOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must be in (0, 1), got {eps}")));
    }
    // With λ_min, λ_max the extreme eigenvalues of M̃⁻¹M, the error energy
    // eᵀMe = rᵀM⁻¹r lies in [rᵀz/λ_max, rᵀz/λ_min]; so rᵀz ≤ (ε/κ) r₀ᵀz₀
    // implies the energy ratio is at most ε.
    let stop = opts.stop.unwrap_or(StopRule::PreconditionedEnergy(eps / pre.condition_bound()));
    let rhs = prob.rhs();
    let lambda = prob.lambda;
    let mut inner_iterations = 0;
    let mut inner_all_converged = true;
    let precond = |r: &[f64], z: &mut [f64]| {
        if pre.degenerate || pre.p.nnz() == 0 {
            z.iter_mut().zip(r).for_each(|(zi, ri)| *zi = ri / lambda);
            return;
        }
        let out = cg_solve(|x, y| apply_shifted_gram(&pre.p, lambda, x, y), r, None, opts.inner_tol, opts.max_inner);
        inner_iterations += out.iterations;
        inner_all_converged &= out.converged;
        z.copy_from_slice(&out.x);
    };
    let out = pcg_solve(|x, y| prob.apply_normal(x, y), precond, &rhs, &prob.x0, stop, opts.max_outer);
    Ok(RidgeSolveOutcome {
        x: out.x,
        outer_iterations: out.iterations,
        inner_iterations,
        converged: out.converged,
        inner_all_converged,
        relative_residual: out.relative_residual,
        preconditioner_nnz: pre.p.nnz(),
        eps_used: pre.eps_used,
        degenerate: pre.degenerate,
    })
}
