//! Dense reference computations (SVD, symmetric eigensolve, Cholesky).
//!
//! These back the exact ridge solve and the preconditioner quality check and
//! serve as independent checks against the iterative and sampling routines.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, MatrixLike, SparseMatrix};
use crate::power::{spectral_norm_estimate, PowerOptions};

/// Largest dimension the dense oracles accept.
pub const ORACLE_MAX_DIM: usize = 512;

const MAX_SWEEPS: usize = 10_000;

fn check_scale(rows: usize, cols: usize) -> Result<()> {
    if rows.max(cols) > ORACLE_MAX_DIM {
        return Err(Error::OracleScale(format!("{rows}x{cols} exceeds {ORACLE_MAX_DIM}")));
    }
    Ok(())
}

/// Singular values in decreasing order.
pub fn singular_values<M: MatrixLike>(a: &M) -> Result<Vec<f64>> {
    check_scale(a.rows(), a.cols())?;
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    let d = a.to_dense().to_nalgebra();
    let (r, c) = d.shape();
    // Golub–Kahan occasionally stalls on inputs with exact zero structure; an
    // unbounded iteration count would then spin forever.
    let mut sv: Vec<f64> = match d.clone().try_svd(false, false, f64::EPSILON, MAX_SWEEPS) {
        Some(svd) => svd.singular_values.iter().copied().collect(),
        None => {
            // eigenvalues of [0 A; Aᵀ 0] are ±σᵢ, plus |r − c| zeros
            let mut aug = DMatrix::zeros(r + c, r + c);
            aug.view_mut((0, r), (r, c)).copy_from(&d);
            aug.view_mut((r, 0), (c, r)).copy_from(&d.transpose());
            let ev = symmetric_eigenvalues(&aug);
            ev.iter().rev().take(r.min(c)).map(|&x| x.max(0.0)).collect()
        }
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// `‖A‖₂` by a full SVD.
pub fn spectral_norm<M: MatrixLike>(a: &M) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Spectral norm of `A − B` for two equally shaped matrices.
pub fn spectral_distance<M: MatrixLike, N: MatrixLike>(a: &M, b: &N) -> Result<f64> {
    let diff = a.to_dense().sub(&b.to_dense())?;
    spectral_norm(&diff)
}

/// Eigenvalues of a symmetric matrix in increasing order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = match m.clone().try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS) {
        Some(e) => e.eigenvalues.iter().copied().collect(),
        // retry with a looser tolerance; eigenvalues are still accurate to ~1e-13
        None => m
            .clone()
            .try_symmetric_eigen(1e3 * f64::EPSILON, 100 * MAX_SWEEPS)
            .expect("symmetric eigensolver did not converge")
            .eigenvalues
            .iter()
            .copied()
            .collect(),
    };
    ev.sort_by(f64::total_cmp);
    ev
}

/// `AᵀA + λI` as a dense matrix.
pub fn gram_shifted<M: MatrixLike>(a: &M, lambda: f64) -> Result<DMatrix<f64>> {
    check_scale(a.rows(), a.cols())?;
    let d = a.to_dense().to_nalgebra();
    let mut g = d.transpose() * &d;
    for i in 0..g.nrows() {
        g[(i, i)] += lambda;
    }
    Ok(g)
}

/// Solves `M x = rhs` for symmetric positive definite `M`.
pub fn solve_spd(m: DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let chol = m.cholesky().ok_or_else(|| Error::InvalidArgument("matrix is not positive definite".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(rhs)).iter().copied().collect())
}

/// Extreme eigenvalues `(min, max)` of `N⁻¹ M` for symmetric `M` and SPD `N`,
/// via `L⁻¹ M L⁻ᵀ` with `N = L Lᵀ`.
pub fn generalized_eigen_range(m: &DMatrix<f64>, n: DMatrix<f64>) -> Result<(f64, f64)> {
    let chol = n.cholesky().ok_or_else(|| Error::InvalidArgument("preconditioner is not positive definite".into()))?;
    let l = chol.l();
    let linv_m =
        l.solve_lower_triangular(m).ok_or_else(|| Error::InvalidArgument("singular Cholesky factor".into()))?;
    let sym = l
        .solve_lower_triangular(&linv_m.transpose())
        .ok_or_else(|| Error::InvalidArgument("singular Cholesky factor".into()))?;
    let sym = (&sym + sym.transpose()) * 0.5;
    let ev = symmetric_eigenvalues(&sym);
    Ok((ev[0], ev[ev.len() - 1]))
}

pub fn dense_from_nalgebra(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_nalgebra(m)
}

/// `‖A − B‖₂`: exact (dense SVD) within oracle scale, otherwise a power-method
/// estimate on the sparse difference. The flag is `true` for the exact path.
pub fn difference_norm<M: MatrixLike, N: MatrixLike>(a: &M, b: &N, seed: u64) -> Result<(f64, bool)> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape("difference of matrices with different shapes".into()));
    }
    if a.rows().max(a.cols()) <= ORACLE_MAX_DIM {
        return Ok((spectral_distance(a, b)?, true));
    }
    let mut entries = Vec::with_capacity(a.nnz() + b.nnz());
    a.for_each_nonzero(|i, j, v| entries.push((i, j, v)));
    b.for_each_nonzero(|i, j, v| entries.push((i, j, -v)));
    let diff = SparseMatrix::from_triplets_summed(a.rows(), a.cols(), entries)?;
    Ok((spectral_norm_estimate(&diff, PowerOptions::default(), seed)?.sigma, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_of_diag() {
        let sv = singular_values(&DenseMatrix::diag(&[1.0, -3.0, 2.0])).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-12);
        assert!((sv[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_range_of_scaled_identity() {
        let m = DMatrix::<f64>::identity(3, 3) * 4.0;
        let n = DMatrix::<f64>::identity(3, 3) * 2.0;
        let (lo, hi) = generalized_eigen_range(&m, n).unwrap();
        assert!((lo - 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn refuses_large_inputs() {
        let big = DenseMatrix::zeros(ORACLE_MAX_DIM + 1, 1);
        assert!(matches!(spectral_norm(&big), Err(Error::OracleScale(_))));
    }
}
