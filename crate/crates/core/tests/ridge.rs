use numsparse::oracle::{gram_shifted, solve_spd};
use numsparse::ridge::{
    build_preconditioner, cg_solve, expected_row_sparsity, precond_quality, precond_ridge_solve_with, ridge_exact,
    RidgeProblem, RidgeSolveOptions,
};
use numsparse::sparsify::SampleConfig;
use numsparse::{DenseMatrix, MatrixLike, SparseMatrix};

fn spd(n: usize, seed: u64) -> DenseMatrix {
    let g = DenseMatrix::random_gaussian(n + 4, n, seed);
    let m = g.transpose().matmul(&g).unwrap();
    DenseMatrix::from_fn(n, n, |i, j| m.get(i, j) + if i == j { 0.5 } else { 0.0 })
}

fn apply(m: &DenseMatrix) -> impl FnMut(&[f64], &mut [f64]) + '_ {
    move |x, y| {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = m.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[test]
fn cg_matches_direct_solve() {
    let m = spd(16, 21);
    let rhs: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
    let out = cg_solve(apply(&m), &rhs, None, 1e-12, 200);
    assert!(out.converged);
    let x = solve_spd(m.to_nalgebra(), &rhs).unwrap();
    for (a, b) in out.x.iter().zip(&x) {
        assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
    }
}

#[test]
fn cg_energy_decrements_are_positive_and_sum_to_initial_error() {
    let m = spd(12, 22);
    let rhs: Vec<f64> = (0..12).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let out = cg_solve(apply(&m), &rhs, None, 1e-14, 500);
    assert!(out.energy_decrements.iter().all(|&d| d > 0.0));
    // from x0 = 0 the error energy is x*ᵀ M x* = rhsᵀ x*
    let xs = solve_spd(m.to_nalgebra(), &rhs).unwrap();
    let e0: f64 = rhs.iter().zip(&xs).map(|(a, b)| a * b).sum();
    let total: f64 = out.energy_decrements.iter().sum();
    assert!((total - e0).abs() <= 1e-9 * e0, "{total} vs {e0}");
}

#[test]
fn genuinely_sparse_preconditioner_still_converges() {
    // budget override far below the formula, so P really drops entries
    let a = DenseMatrix::random_gaussian(64, 16, 30);
    let sigma = numsparse::oracle::spectral_norm(&a).unwrap();
    let lambda = sigma * sigma / 100.0;
    let b: Vec<f64> = DenseMatrix::random_gaussian(64, 1, 31).into_data();
    let prob = RidgeProblem::new(&a, b, lambda, None).unwrap();
    let cfg = SampleConfig::new(0.5, 1.0, 32).with_budget(200.0);
    let pre = build_preconditioner(&a, lambda, 0.25, &cfg).unwrap();
    assert!(pre.p.nnz() < a.nnz() * 3 / 4, "nnz {}", pre.p.nnz());
    let (lo, hi) = precond_quality(&a, &pre.p, lambda).unwrap();
    assert!(lo > 0.0 && hi.is_finite());
    let out = precond_ridge_solve_with(&prob, &pre, 1e-6, &RidgeSolveOptions::default()).unwrap();
    let xs = ridge_exact(&prob).unwrap();
    let ratio = prob.energy_distance(&out.x, &xs) / prob.energy_distance(&prob.x0, &xs);
    assert!(out.converged && ratio <= 1e-6 * (hi / lo), "ratio {ratio}, κ̃ {}", hi / lo);
    assert!(out.outer_iterations > 1);
}

#[test]
fn exact_solution_satisfies_normal_equations() {
    let a = DenseMatrix::random_gaussian(30, 10, 40);
    let b: Vec<f64> = DenseMatrix::random_gaussian(30, 1, 41).into_data();
    let prob = RidgeProblem::new(&a, b, 0.7, None).unwrap();
    let x = ridge_exact(&prob).unwrap();
    let m = gram_shifted(&a, 0.7).unwrap();
    let mx = &m * nalgebra::DVector::from_column_slice(&x);
    for (u, v) in mx.iter().zip(prob.rhs()) {
        assert!((u - v).abs() < 1e-10 * (1.0 + v.abs()));
    }
}

#[test]
fn expected_row_sparsity_by_enumeration() {
    let p = SparseMatrix::from_triplets(
        3,
        4,
        vec![(0, 0, 1.0), (0, 3, 2.0), (1, 1, -3.0), (2, 0, 1.0), (2, 1, 1.0), (2, 2, 1.0)],
    )
    .unwrap();
    // row weights ‖Pᵢ‖² / ‖P‖_F² = 5/17, 9/17, 3/17; nnz 2, 1, 3
    let expect = (5.0 * 2.0 + 9.0 * 1.0 + 3.0 * 3.0) / 17.0;
    assert!((expected_row_sparsity(&p).unwrap() - expect).abs() < 1e-15);
}
