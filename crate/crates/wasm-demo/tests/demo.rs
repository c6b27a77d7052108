use numsparse::oracle::{spectral_distance, spectral_norm};
use numsparse::DenseMatrix;
use numsparse_wasm_demo::{convergence_view, probe_view, sparsify_view};

#[test]
fn sparsify_view_is_consistent_and_deterministic() {
    let v = sparsify_view("gaussian", 24, 0.5, 3).unwrap();
    assert_eq!((v.rows, v.cols), (24, 24));
    assert_eq!(v.input.len(), 576);
    assert_eq!(v.sample.iter().filter(|&&x| x != 0.0).count(), v.sample_nnz);
    let a = DenseMatrix::new(24, 24, v.input.clone()).unwrap();
    let p = DenseMatrix::new(24, 24, v.sample.clone()).unwrap();
    let rel = spectral_distance(&a, &p).unwrap() / spectral_norm(&a).unwrap();
    assert!((rel - v.relative_error).abs() < 1e-12);
    let again = sparsify_view("gaussian", 24, 0.5, 3).unwrap();
    assert_eq!(again.sample, v.sample);
}

#[test]
fn sparsify_view_rejects_bad_input() {
    assert!(sparsify_view("banana", 8, 0.5, 1).is_err());
    assert!(sparsify_view("gaussian", 0, 0.5, 1).is_err());
    assert!(sparsify_view("gaussian", 1000, 0.5, 1).is_err());
    assert!(sparsify_view("hard", 12, 0.5, 1).is_err());
    assert!(sparsify_view("hard", 32, 0.5, 1).is_ok());
}

#[test]
fn probe_curve_is_monotone_with_threshold() {
    let v = probe_view(64, 4, 0.1).unwrap();
    assert_eq!(v.curve.len(), 65);
    assert!(v.curve.windows(2).all(|w| w[1].1 <= w[0].1));
    let s = v.s_star.unwrap();
    assert!(v.curve.iter().all(|&(t, lb)| (lb > 0.1) == (t < s)));
    assert!(probe_view(64, 4, 0.7).is_err());
}

#[test]
fn preconditioned_cg_beats_plain_cg() {
    let v = convergence_view(1e4, 1.0, 12, 5).unwrap();
    assert_eq!(v.cg.len(), 13);
    assert!((v.cg[0] - 1.0).abs() < 1e-12 && (v.pcg[0] - 1.0).abs() < 1e-12);
    assert!(v.pcg[3] < 1e-6, "{:?}", v.pcg);
    assert!(v.cg[3] > 1e-3, "{:?}", v.cg);
}

#[test]
fn sparse_preconditioner_still_helps() {
    let v = convergence_view(1e4, 0.4, 30, 6).unwrap();
    assert!(v.preconditioner_nnz < v.input_nnz);
    assert!(v.pcg[10] < v.cg[10], "pcg {} vs cg {}", v.pcg[10], v.cg[10]);
    assert!(v.pcg.last().unwrap() < &1e-3);
}
