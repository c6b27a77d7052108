use proptest::prelude::*;

use numsparse::hard::{hadamard, tail_norm};
use numsparse::sparsify::{sparsify_l1_rows, HybridSparsifier, SampleConfig};
use numsparse::{matrix_ns, numerical_sparsity, DenseMatrix, MatrixLike};

fn small_matrix() -> impl Strategy<Value = DenseMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![3 => -10.0f64..10.0, 1 => Just(0.0)], r * c)
            .prop_map(move |d| DenseMatrix::new(r, c, d).unwrap())
    })
}

fn nonzero(m: &DenseMatrix) -> bool {
    m.data().iter().any(|&x| x != 0.0)
}

proptest! {
    #[test]
    fn ns_is_scale_and_permutation_invariant(
        v in prop::collection::vec(-5.0f64..5.0, 1..30),
        c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        rot in 0usize..30,
    ) {
        prop_assume!(v.iter().any(|&x| x != 0.0));
        let ns = numerical_sparsity(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let mut perm = v.clone();
        perm.rotate_left(rot % v.len());
        perm.reverse();
        prop_assert!((numerical_sparsity(&scaled).unwrap() - ns).abs() <= 1e-12 * ns);
        prop_assert!((numerical_sparsity(&perm).unwrap() - ns).abs() <= 1e-12 * ns);
        let nnz = v.iter().filter(|&&x| x != 0.0).count() as f64;
        prop_assert!(ns >= 1.0 - 1e-12 && ns <= nnz + 1e-12);
    }

    #[test]
    fn matrix_ns_is_transpose_invariant(a in small_matrix()) {
        prop_assume!(nonzero(&a));
        let x = matrix_ns(&a);
        prop_assert!((matrix_ns(&a.transpose()) - x).abs() <= 1e-12 * x);
    }

    #[test]
    fn hybrid_sampler_is_scale_equivariant(a in small_matrix(), e in -8i32..8, seed in any::<u64>()) {
        prop_assume!(nonzero(&a));
        let c = 2f64.powi(e);
        let cfg = SampleConfig::new(0.5, 0.25, 9).with_budget(3.0);
        let p = HybridSparsifier::new(&a, &cfg).unwrap().sample(seed);
        let q = HybridSparsifier::new(&a.scale(c), &cfg).unwrap().sample(seed);
        prop_assert_eq!(p.scale(c).to_dense(), q.to_dense());
    }

    #[test]
    fn l1_rows_respects_row_budget(a in small_matrix(), s in 1usize..5, seed in any::<u64>()) {
        let p = sparsify_l1_rows(&a, s, seed).unwrap();
        prop_assert!(p.max_row_nnz() <= s);
        for i in 0..a.rows() {
            let zero_row = a.row(i).iter().all(|&x| x == 0.0);
            prop_assert_eq!(zero_row, p.row_nnz(i) == 0);
        }
    }

    #[test]
    fn hybrid_keeps_support(a in small_matrix(), seed in any::<u64>()) {
        prop_assume!(nonzero(&a));
        let p = HybridSparsifier::with_budget(&a, 2.0).unwrap().sample(seed);
        for &(i, j, _) in p.entries() {
            prop_assert!(a.get(i, j) != 0.0);
        }
    }

    #[test]
    fn tail_norm_monotone(v in prop::collection::vec(-3.0f64..3.0, 1..25)) {
        let t: Vec<f64> = (0..=v.len()).map(|c| tail_norm(&v, c)).collect();
        prop_assert!(t.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(t[v.len()], 0.0);
    }

    #[test]
    fn hadamard_is_orthogonal(e in 0u32..7) {
        let k = 1usize << e;
        let h = hadamard(k).unwrap();
        prop_assert_eq!(h.matmul(&h.transpose()).unwrap(), DenseMatrix::identity(k).scale(k as f64));
    }
}
