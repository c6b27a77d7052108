use numsparse::hard::{
    build_circulant, build_hard_matrix, build_tail_vector, hadamard, sparsity_necessity_probe, tail_norm,
};
use numsparse::oracle::spectral_norm;
use numsparse::{matrix_ns, numeric, numerical_sparsity};

#[test]
fn tail_norm_is_non_increasing_in_kept_count() {
    let a = build_tail_vector(256, 0.4).unwrap();
    let tails: Vec<f64> = (0..=256).map(|c| tail_norm(&a, c)).collect();
    assert!(tails.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(tails[256], 0.0);
    assert!((tails[0] - numeric::norm2(&a)).abs() < 1e-15);
}

#[test]
fn tail_vector_numerical_sparsity_scales_as_inverse_alpha_squared() {
    let m = 1 << 10;
    for alpha in [0.2, 0.3, 0.5] {
        let ns = numerical_sparsity(&build_tail_vector(m, alpha).unwrap()).unwrap();
        let ratio = ns * alpha * alpha;
        assert!((0.2..=5.0).contains(&ratio), "α = {alpha}: ns·α² = {ratio}");
    }
}

#[test]
fn tail_mass_decays_no_faster_than_the_power_law() {
    let m = 1 << 10;
    let alpha = 0.5;
    let a = build_tail_vector(m, alpha).unwrap();
    // exact summation over the sorted tail as the reference
    let mut sorted = a.clone();
    sorted.sort_by(|x, y| y.total_cmp(x));
    for c in (1..=8).map(|e| 1usize << e) {
        let exact: f64 = sorted[c..].iter().map(|x| x * x).sum();
        let t = tail_norm(&a, c);
        assert!((t * t - exact).abs() <= 1e-14);
        let floor = 0.05 * (c as f64).powf(-(1.0 + 2.0 * alpha));
        assert!(t * t >= floor, "c = {c}: {} < {floor}", t * t);
    }
}

#[test]
fn lifted_numerical_sparsity_is_k_times_base() {
    for (n, k) in [(32, 4), (64, 8), (16, 2)] {
        let inst = build_hard_matrix(n, k, 0.5).unwrap();
        let base = numerical_sparsity(&inst.a).unwrap();
        let r = matrix_ns(&inst.aprime) / (k as f64 * base);
        assert!((0.5..=2.0).contains(&r), "n={n} k={k}: {r}");
    }
}

#[test]
fn small_instance_spectral_norm() {
    let inst = build_hard_matrix(8, 2, 0.5).unwrap();
    let l1 = numeric::norm1(&inst.a);
    let s = spectral_norm(&inst.aprime).unwrap();
    assert!((s - 2f64.sqrt() * l1).abs() < 1e-12);
    assert!((inst.spectral_norm() - s).abs() < 1e-12);
}

#[test]
fn circulant_rows_are_shifts() {
    let a = build_tail_vector(8, 0.5).unwrap();
    let c = build_circulant(&a);
    for j in 0..8 {
        let mut row: Vec<f64> = c.row(j).to_vec();
        row.rotate_left(j);
        assert_eq!(row, a);
    }
}

#[test]
fn hadamard_entries_are_signs() {
    let h = hadamard(16).unwrap();
    assert!(h.data().iter().all(|&x| x == 1.0 || x == -1.0));
    assert!(hadamard(12).is_err());
}

#[test]
fn probe_lower_bound_decreases_and_hits_zero() {
    let inst = build_hard_matrix(64, 4, 0.4).unwrap();
    let grid: Vec<usize> = (0..=64).collect();
    let rep = sparsity_necessity_probe(&inst, 0.1, &grid).unwrap();
    assert!(rep.points.windows(2).all(|w| w[1].lower_bound <= w[0].lower_bound));
    assert_eq!(rep.points.last().unwrap().lower_bound, 0.0);
    let s = rep.s_star.unwrap();
    assert!(rep.points.iter().all(|p| p.exceeds_eps == (p.s < s)));
}
