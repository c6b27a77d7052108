//! Spectral-norm estimation by power iteration on `AᵀA`.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::MatrixLike;
use crate::numeric;
use crate::rng::{stage, Seed};

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    /// Relative tolerance in `(0, 1)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 5000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Estimates `‖A‖₂` from below.
///
/// The start vector is uniform on the unit sphere (normalised Gaussian drawn
/// from `seed`). Iteration stops once the relative change of the estimate
/// drops below `tol / 10`; every iterate is a Rayleigh quotient of `AᵀA`, so
/// the estimate never exceeds the true norm. An exhausted `max_iter` returns
/// the best estimate with `converged = false`.
pub fn spectral_norm_estimate<M: MatrixLike>(a: &M, opts: PowerOptions, seed: u64) -> Result<SpectralEstimate> {
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::InvalidArgument(format!("power-method tolerance {} not in (0, 1)", opts.tol)));
    }
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 || a.nnz() == 0 {
        return Ok(SpectralEstimate { sigma: 0.0, iterations: 0, converged: true });
    }

    let mut rng = Seed::new(seed).derive(stage::POWER).rng();
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);

    let mut w = vec![0.0; m];
    let mut best = 0.0f64;
    let mut prev = 0.0f64;
    for it in 1..=opts.max_iter {
        a.mul_vec_into(&v, &mut w);
        let sigma = numeric::norm2(&w);
        best = best.max(sigma);
        if sigma == 0.0 {
            // Start vector landed in the null space; restart from a fresh draw.
            v = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            normalize(&mut v);
            continue;
        }
        if it > 1 && (sigma - prev).abs() <= 0.1 * opts.tol * sigma {
            return Ok(SpectralEstimate { sigma: best, iterations: it, converged: true });
        }
        prev = sigma;
        a.tr_mul_vec_into(&w, &mut v);
        normalize(&mut v);
    }
    Ok(SpectralEstimate { sigma: best, iterations: opts.max_iter, converged: false })
}

fn normalize(v: &mut [f64]) {
    let norm = numeric::norm2(v);
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    #[test]
    fn diagonal_and_identity() {
        let opts = PowerOptions::default();
        let d = spectral_norm_estimate(&DenseMatrix::diag(&[1.0, 2.0, 3.0]), opts, 3).unwrap();
        assert!(d.converged);
        assert!((d.sigma - 3.0).abs() <= 3e-6, "{}", d.sigma);
        let i = spectral_norm_estimate(&DenseMatrix::identity(5), opts, 3).unwrap();
        assert!((i.sigma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = DenseMatrix::from_fn(6, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let x = spectral_norm_estimate(&a, PowerOptions::default(), 9).unwrap();
        let y = spectral_norm_estimate(&a, PowerOptions::default(), 9).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn exhausted_iterations_are_flagged() {
        let a = DenseMatrix::diag(&[1.0, 0.999_999]);
        let est = spectral_norm_estimate(&a, PowerOptions { tol: 1e-12, max_iter: 3 }, 1).unwrap();
        assert!(!est.converged);
        assert!(est.sigma <= 1.0 + 1e-15);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let opts = PowerOptions { tol: 1.5, max_iter: 10 };
        assert!(spectral_norm_estimate(&DenseMatrix::identity(2), opts, 0).is_err());
    }
}
