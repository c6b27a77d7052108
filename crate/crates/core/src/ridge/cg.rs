//! Conjugate gradients, plain and preconditioned.

use crate::numeric::{axpy, dot, norm2};

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖b − Mx‖₂ / ‖b‖₂` at exit.
    pub relative_residual: f64,
    /// Residual 2-norm before the first and after every iteration.
    pub residual_history: Vec<f64>,
    /// `αₖ rₖᵀrₖ` for every iteration: the drop of the error energy
    /// `‖x* − xₖ‖²_M` in step `k`.
    pub energy_decrements: Vec<f64>,
}

/// Solves `M x = rhs` for symmetric positive definite `M`, given as
/// `apply(v, out)` writing `M v` into `out`. Stops when
/// `‖r‖₂ ≤ tol · ‖rhs‖₂` or after `max_iter` iterations (best iterate
/// returned, `converged = false`).
pub fn cg_solve<F>(mut apply: F, rhs: &[f64], x0: Option<&[f64]>, tol: f64, max_iter: usize) -> CgOutcome
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let rhs_norm = norm2(rhs);
    let mut r = rhs.to_vec();
    let mut mv = vec![0.0; n];
    if x0.is_some() {
        apply(&x, &mut mv);
        axpy(-1.0, &mv, &mut r);
    }
    let scale = if rhs_norm > 0.0 { rhs_norm } else { 1.0 };
    let mut rr = dot(&r, &r);
    let mut history = vec![rr.sqrt()];
    let mut decrements = Vec::new();
    if rr.sqrt() <= tol * rhs_norm || rr == 0.0 {
        return CgOutcome {
            x,
            iterations: 0,
            converged: true,
            relative_residual: rr.sqrt() / scale,
            residual_history: history,
            energy_decrements: decrements,
        };
    }
    let mut p = r.clone();
    for it in 1..=max_iter {
        apply(&p, &mut mv);
        let pmp = dot(&p, &mv);
        if pmp <= 0.0 {
            break;
        }
        let alpha = rr / pmp;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &mv, &mut r);
        decrements.push(alpha * rr);
        let rr_new = dot(&r, &r);
        history.push(rr_new.sqrt());
        if rr_new.sqrt() <= tol * rhs_norm {
            return CgOutcome {
                x,
                iterations: it,
                converged: true,
                relative_residual: rr_new.sqrt() / scale,
                residual_history: history,
                energy_decrements: decrements,
            };
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    let iterations = history.len() - 1;
    CgOutcome {
        x,
        iterations,
        converged: false,
        relative_residual: rr.sqrt() / scale,
        residual_history: history,
        energy_decrements: decrements,
    }
}

/// Stopping rule of the preconditioned solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// `‖b − Mx‖₂ ≤ tol · ‖b‖₂`.
    RelativeResidual(f64),
    /// `rᵀz ≤ ratio · r₀ᵀz₀` where `z` is the preconditioned residual.
    PreconditionedEnergy(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub relative_residual: f64,
    /// `rₖᵀzₖ` before the first and after every iteration.
    pub rz_history: Vec<f64>,
}

/// Preconditioned CG for `M x = rhs` with `precond(r, z)` approximating
/// `z = M̃⁻¹ r`.
pub fn pcg_solve<F, P>(
    mut apply: F,
    mut precond: P,
    rhs: &[f64],
    x0: &[f64],
    stop: StopRule,
    max_iter: usize,
) -> PcgOutcome
where
    F: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let mut x = x0.to_vec();
    let mut mv = vec![0.0; n];
    apply(&x, &mut mv);
    let mut r = rhs.to_vec();
    axpy(-1.0, &mv, &mut r);
    let rhs_norm = norm2(rhs);
    let scale = if rhs_norm > 0.0 { rhs_norm } else { 1.0 };
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut rz = dot(&r, &z);
    let rz0 = rz;
    let mut hist = vec![rz];

    let done = |r: &[f64], rz: f64| -> bool {
        let rn = norm2(r);
        // Local floor: a residual at rounding level of the data is final.
        if rn <= 1e-14 * scale {
            return true;
        }
        match stop {
            StopRule::RelativeResidual(tol) => rn <= tol * rhs_norm,
            StopRule::PreconditionedEnergy(ratio) => rz <= ratio * rz0,
        }
    };
    if rz0 <= 0.0 || done(&r, rz) {
        return PcgOutcome {
            relative_residual: norm2(&r) / scale,
            x,
            iterations: 0,
            converged: true,
            rz_history: hist,
        };
    }
    let mut p = z.clone();
    for it in 1..=max_iter {
        apply(&p, &mut mv);
        let pmp = dot(&p, &mv);
        if pmp <= 0.0 {
            break;
        }
        let alpha = rz / pmp;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &mv, &mut r);
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        hist.push(rz_new);
        if done(&r, rz_new) {
            return PcgOutcome {
                relative_residual: norm2(&r) / scale,
                x,
                iterations: it,
                converged: true,
                rz_history: hist,
            };
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    PcgOutcome {
        relative_residual: norm2(&r) / scale,
        x,
        iterations: hist.len() - 1,
        converged: false,
        rz_history: hist,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_identity_in_one_step() {
        let v = [1.0, -2.0, 0.5];
        let out = cg_solve(|x, y| y.iter_mut().zip(x).for_each(|(yi, xi)| *yi = 2.0 * xi), &v, None, 1e-12, 10);
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        for (xi, vi) in out.x.iter().zip(v) {
            assert!((xi - vi / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_terminates_in_n_steps() {
        let d = [1.0, 3.0, 7.0, 11.0];
        let rhs = [1.0, 1.0, 1.0, 1.0];
        let out = cg_solve(
            |x, y| y.iter_mut().zip(x).zip(d).for_each(|((yi, xi), di)| *yi = di * xi),
            &rhs,
            None,
            1e-12,
            d.len(),
        );
        assert!(out.converged, "{:?}", out.residual_history);
        assert!(out.iterations <= d.len());
        for (k, xi) in out.x.iter().enumerate() {
            assert!((xi - 1.0 / d[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_rhs_and_exhaustion() {
        let out = cg_solve(|x, y| y.copy_from_slice(x), &[0.0, 0.0], None, 1e-8, 5);
        assert!(out.converged);
        assert_eq!(out.x, vec![0.0, 0.0]);
        let d = [1.0, 100.0, 1e4];
        let out = cg_solve(
            |x, y| y.iter_mut().zip(x).zip(d).for_each(|((yi, xi), di)| *yi = di * xi),
            &[1.0, 1.0, 1.0],
            None,
            1e-14,
            1,
        );
        assert!(!out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn pcg_with_exact_preconditioner_is_one_step() {
        let d = [2.0, 5.0, 9.0];
        let out = pcg_solve(
            |x, y| y.iter_mut().zip(x).zip(d).for_each(|((yi, xi), di)| *yi = di * xi),
            |r, z| z.iter_mut().zip(r).zip(d).for_each(|((zi, ri), di)| *zi = ri / di),
            &[1.0, 2.0, 3.0],
            &[0.0; 3],
            StopRule::RelativeResidual(1e-12),
            10,
        );
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
    }
}
