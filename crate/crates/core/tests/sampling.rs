use approx::assert_relative_eq;
use proptest::prelude::*;

use legendre_cs::rng::derive_seed;
use legendre_cs::sampling::*;

#[test]
fn draws_replay_bit_for_bit() {
    for dist in [Distribution::Uniform, Distribution::Chebyshev] {
        let a = draw(dist, 3, 1, 7).unwrap();
        let b = draw(dist, 3, 1, 7).unwrap();
        assert_eq!(a.coords(), b.coords());
        assert_ne!(a.coords(), draw(dist, 3, 1, 8).unwrap().coords());
    }
}

#[test]
fn uniform_law_of_large_numbers() {
    let q = draw_uniform(100_000, 1, 11).unwrap();
    let mean = q.coords().iter().sum::<f64>() / 1e5;
    assert!(mean.abs() < 0.01, "mean {mean}");
    let q = draw_uniform(100_000, 2, 12).unwrap();
    let positive = q.points().filter(|p| p[0] > 0.0).count() as f64 / 1e5;
    assert!((positive - 0.5).abs() < 0.006, "fraction {positive}");
}

#[test]
fn chebyshev_arcsine_mass() {
    let q = draw_chebyshev(100_000, 1, 13).unwrap();
    let inner = q.coords().iter().filter(|y| y.abs() <= 0.5).count() as f64 / 1e5;
    assert!((inner - 1.0 / 3.0).abs() < 0.01, "inner mass {inner}");
    let mean = q.coords().iter().sum::<f64>() / 1e5;
    assert!(mean.abs() < 0.02);
}

#[test]
fn centered_test_value_matches_high_precision() {
    // mpmath: 4 * (2/sqrt(pi)) * exp(-(pi/8) * sqrt(8))
    let q = SampleSet::from_coords(vec![0.0; 4], 1, Distribution::Uniform, 0).unwrap();
    let t = compute_test_value(&q, 0.5).unwrap();
    assert_relative_eq!(t.value, 1.4863981793663976, max_relative = 1e-14);
    assert!(t.per_sample.iter().all(|&z| z >= 0.0));
}

#[test]
fn boundary_points_score_infinite() {
    let q = SampleSet::from_coords(vec![1.0, 0.0], 1, Distribution::Uniform, 0).unwrap();
    assert_eq!(compute_test_value(&q, 0.5).unwrap().value, f64::INFINITY);
    assert!(!is_preferable_1d(&q, 0.5).unwrap());
}

#[test]
fn analytic_thresholds() {
    // mpmath: two-term formula at m = 100, gamma0 = 0.8
    assert_relative_eq!(preferable_threshold_1d(100, 0.8).unwrap(), 27.76068384928934, max_relative = 1e-13);
    // gamma0 -> 1: 32 sqrt2 / (pi sqrt pi) + 4 sqrt2 / pi
    assert_relative_eq!(preferable_threshold_1d(1, 1.0 - 1e-12).unwrap(), 9.927818031897056, max_relative = 1e-11);
    assert!(preferable_threshold_1d(100, 1.0).is_err());

    let center = SampleSet::from_coords(vec![0.0; 100], 1, Distribution::Uniform, 0).unwrap();
    assert!(is_preferable_1d(&center, 0.8).unwrap());
}

#[test]
fn analytic_criterion_accepts_often_enough() {
    for gamma0 in [0.5, 0.8] {
        let n = 2000;
        let accepted = (0..n as u64)
            .filter(|&i| {
                let q = draw_uniform(100, 1, derive_seed(99, &[i])).unwrap();
                is_preferable_1d(&q, gamma0).unwrap()
            })
            .count() as f64
            / n as f64;
        let floor = 1.0 - gamma0 - 3.0 * (gamma0 * (1.0 - gamma0) / n as f64).sqrt();
        assert!(accepted >= floor, "gamma0 {gamma0}: {accepted} < {floor}");
    }
}

#[test]
fn percentile_threshold_is_coherent() {
    let (m, d, gamma0, n_ref, seed) = (100, 1, 0.8, 5000, 5);
    let threshold = estimate_percentile_threshold(m, d, gamma0, n_ref, seed).unwrap();
    assert_eq!(threshold, estimate_percentile_threshold(m, d, gamma0, n_ref, seed).unwrap());
    let refs = reference_test_values(m, d, gamma0, n_ref, seed).unwrap();
    let below = refs.iter().filter(|&&t| t <= threshold).count();
    assert!((below as f64 - (1.0 - gamma0) * n_ref as f64).abs() <= 1.0, "{below}");

    let tiny = estimate_percentile_threshold(20, 2, 1e-9, 200, 3).unwrap();
    let max = reference_test_values(20, 2, 1e-9, 200, 3)
        .unwrap()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    assert_relative_eq!(tiny, max, max_relative = 1e-6);
}

#[test]
fn quintile_group_sizes() {
    let sets: Vec<SampleSet> = (0..1000).map(|i| draw_uniform(20, 1, i).unwrap()).collect();
    let groups = rank_into_groups(&sets, 0.8, 5).unwrap();
    assert!(groups.iter().all(|g| g.len() == 200));

    let keys: Vec<(f64, u64)> = (0..7).map(|i| (1.0, 100 - i)).collect();
    let groups = group_by_rank(&keys, 5);
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    assert_eq!(sizes, [2, 2, 1, 1, 1]);
    // equal scores fall back to seed order
    assert_eq!(groups[0], [6, 5]);
    assert_eq!(groups, group_by_rank(&keys, 5));
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.csv");
    let mut q = draw_chebyshev(17, 3, 42).unwrap();
    test_value(&mut q, 0.3).unwrap();
    write_sample_set_csv(&q, &path).unwrap();
    let back = read_sample_set_csv(&path).unwrap();
    assert_eq!(back, q);
}

proptest! {
    #[test]
    fn draws_stay_in_cube(m in 1usize..50, d in 1usize..4, seed: u64, cheb: bool) {
        let dist = if cheb { Distribution::Chebyshev } else { Distribution::Uniform };
        let q = draw(dist, m, d, seed).unwrap();
        prop_assert_eq!(q.coords().len(), m * d);
        prop_assert!(q.coords().iter().all(|y| y.abs() <= 1.0));
    }

    #[test]
    fn test_value_is_sum_of_terms(m in 1usize..40, d in 1usize..3, seed: u64, gamma0 in 0.05f64..0.95) {
        let q = draw_uniform(m, d, seed).unwrap();
        let t = compute_test_value(&q, gamma0).unwrap();
        let sum: f64 = t.per_sample.iter().sum();
        prop_assert!((t.value - sum).abs() <= 1e-12 * sum.abs());
        prop_assert!(t.per_sample.iter().all(|&z| z >= 0.0));
    }

    #[test]
    fn concatenation_is_additive_at_joint_m(a in 1usize..30, b in 1usize..30, seed: u64, gamma0 in 0.05f64..0.95) {
        let p = draw_uniform(a, 2, seed).unwrap();
        let q = draw_uniform(b, 2, seed.wrapping_add(1)).unwrap();
        let joint = p.concat(&q).unwrap();
        let m = a + b;
        let parts: f64 = p
            .points()
            .chain(q.points())
            .map(|y| sample_weight(y, m, gamma0))
            .sum();
        let t = compute_test_value(&joint, gamma0).unwrap().value;
        prop_assert!((t - parts).abs() <= 1e-12 * parts.abs().max(1e-300));
    }

    #[test]
    fn groups_partition_in_score_order(n in 2usize..60, g in 2usize..7, seed: u64) {
        let sets: Vec<SampleSet> = (0..n as u64).map(|i| draw_uniform(8, 1, derive_seed(seed, &[i])).unwrap()).collect();
        let groups = rank_into_groups(&sets, 0.8, g).unwrap();
        let mut seen: Vec<usize> = groups.concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let score = |i: usize| compute_test_value(&sets[i], 0.8).unwrap().value;
        let flat = groups.concat();
        prop_assert!(flat.windows(2).all(|w| score(w[0]) <= score(w[1])));
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]) && sizes[0] - sizes[g - 1] <= 1);
    }
}
