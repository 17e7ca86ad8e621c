mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use common::{pair_margin, tiny_instance, unit_gaussian, vertex_optimum};
use legendre_cs::basis::make_window_set;
use legendre_cs::measurement::{assemble, gen_sparse_signal, observe, SensingMatrix};
use legendre_cs::sampling::draw_uniform;
use legendre_cs::solver::*;
use legendre_cs::theory::{empirical_re_constant, l1_error_bound};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn assert_feasible(a: &DMatrix<f64>, g: &DVector<f64>, r: &RecoveryResult, eta: f64) {
    let residual = (a * &r.solution - g).norm();
    let allowed = eta + cfg().feas_tol * (1.0 + g.norm());
    assert!(residual <= allowed, "residual {residual} > {allowed}");
    assert!((r.objective - r.solution.lp_norm(1)).abs() <= 1e-12 * (1.0 + r.objective));
}

#[test]
fn tiny_instances_reach_the_exact_optimum() {
    let mut compared = 0;
    for i in 0..60 {
        let (a, c) = tiny_instance(i);
        let g = &a * c.to_dense();
        let r = solve_bp(&a, &g, &cfg()).unwrap();
        assert!(r.converged, "instance {i}: {r:?}");
        assert_feasible(&a, &g, &r, 0.0);
        let (opt, vertices) = vertex_optimum(&a, &g);
        assert!((r.objective - opt).abs() <= 1e-6 * opt, "instance {i}: {} vs {opt}", r.objective);

        let oracle = l0_oracle(&a, &g, 2, 1e-10).unwrap().unwrap().to_dense();
        let oracle_is_unique_optimum = vertices.iter().all(|v| (v - &oracle).norm() <= 1e-8 * oracle.norm());
        if pair_margin(&a) >= 0.3 && oracle_is_unique_optimum {
            compared += 1;
            let err = (&r.solution - &oracle).norm() / oracle.norm();
            assert!(err <= 1e-6, "instance {i}: rel error {err}");
        }
    }
    assert!(compared >= 50, "only {compared} instances compared");
}

#[test]
fn oracle_recovers_planted_support() {
    let a = unit_gaussian(8, 12, 3);
    let g = a.column(3) * 2.5;
    let c = l0_oracle(&a, &g, 1, 1e-10).unwrap().unwrap();
    assert_eq!(c.support(), &[3]);
    assert!((c.values()[0] - 2.5).abs() < 1e-10);
    assert_eq!(l0_oracle(&a, &DVector::zeros(8), 2, 1e-10).unwrap().unwrap().sparsity(), 0);
}

#[test]
fn noisy_recovery_within_error_bound() {
    let (m, n, s, eta) = (25, 40, 3, 1e-3);
    let a = unit_gaussian(m, n, 17);
    let alpha = 2.0;
    let kappa = empirical_re_constant(&a, s, alpha, 20_000, 5).unwrap();
    assert!(kappa > 0.0 && kappa < 1.0, "RE constant {kappa}");
    let delta = 1.0 - kappa;
    let sensing = SensingMatrix::from_matrix(
        a.clone(),
        legendre_cs::measurement::Provenance {
            index_set: "gaussian".into(),
            sample_seed: 17,
            distribution: legendre_cs::sampling::Distribution::Uniform,
        },
    )
    .unwrap();
    for seed in 0..10 {
        let c = gen_sparse_signal(n, s, seed).unwrap();
        let g = observe(&sensing, &c, eta, seed + 100).unwrap().values;
        let r = solve_bpdn(&a, &g, eta, &cfg()).unwrap();
        assert!(r.converged, "{r:?}");
        assert_feasible(&a, &g, &r, eta);
        let err = (&r.solution - c.to_dense()).lp_norm(1);
        let bound = l1_error_bound(0.0, eta, s, alpha, delta).unwrap();
        assert!(err <= bound, "seed {seed}: l1 error {err} > bound {bound}");
    }
}

#[test]
fn legendre_instance_recovers_sparse_signal() {
    let q = draw_uniform(100, 1, 1).unwrap();
    let a = assemble(&make_window_set(1, 200).unwrap(), &q).unwrap();
    let c = gen_sparse_signal(200, 5, 2).unwrap();
    let g = a.matrix() * c.to_dense();
    let r = solve_bp(a.matrix(), &g, &cfg()).unwrap();
    let metrics = recovery_metrics(&c, &r, 1e-4).unwrap();
    assert!(metrics.success, "{metrics:?}");
    assert_feasible(a.matrix(), &g, &r, 0.0);
}

#[test]
fn best_s_term_examples() {
    assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 1), 3.0);
    assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 0), 6.0);
    assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 3), 0.0);
}

fn brute_best_s_term(z: &[f64], s: usize) -> f64 {
    use itertools::Itertools;
    let total: f64 = z.iter().map(|v| v.abs()).sum();
    (0..z.len())
        .combinations(s)
        .map(|keep| total - keep.iter().map(|&i| z[i].abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_equivariance(i in 0u64..1000, lambda in 0.01f64..100.0) {
        let (a, c) = tiny_instance(i);
        let g = &a * c.to_dense();
        let base = solve_bp(&a, &g, &cfg()).unwrap();
        let scaled = solve_bp(&a, &(&g * lambda), &cfg()).unwrap();
        prop_assert!(base.converged && scaled.converged);
        let expected = lambda * base.objective;
        prop_assert!((scaled.objective - expected).abs() <= 1e-6 * expected);
    }

    #[test]
    fn converged_solutions_are_feasible(seed: u64, m in 3usize..10, extra in 1usize..8) {
        let n = m + extra;
        let a = unit_gaussian(m, n, seed);
        let g = DVector::from_fn(m, |k, _| ((seed >> (k % 60)) & 7) as f64 - 3.5);
        let r = solve_bp(&a, &g, &cfg()).unwrap();
        prop_assert!(r.primal_residual.is_finite() && r.objective.is_finite());
        if r.converged {
            let residual = (&a * &r.solution - &g).norm();
            prop_assert!(residual <= cfg().feas_tol * (1.0 + g.norm()));
        }
    }

    #[test]
    fn soft_threshold_is_non_expansive(
        a in proptest::collection::vec(-10.0f64..10.0, 12),
        b in proptest::collection::vec(-10.0f64..10.0, 12),
        t in 0.0f64..5.0,
    ) {
        let (a, b) = (DVector::from_vec(a), DVector::from_vec(b));
        let lhs = (soft_threshold(&a, t) - soft_threshold(&b, t)).norm();
        prop_assert!(lhs <= (a - b).norm() + 1e-12);
    }

    #[test]
    fn best_s_term_matches_enumeration(z in proptest::collection::vec(-5.0f64..5.0, 1..9), s in 0usize..9) {
        let s = s.min(z.len());
        let fast = best_s_term_error(&z, s);
        prop_assert!((fast - brute_best_s_term(&z, s)).abs() <= 1e-12);
    }

    #[test]
    fn bpdn_is_feasible_and_no_worse_than_truth(seed in 0u64..500, eta in 1e-4f64..1e-1) {
        let a = unit_gaussian(10, 20, seed);
        let c = gen_sparse_signal(20, 2, seed).unwrap();
        let g = &a * c.to_dense() + DVector::from_element(10, eta / 10f64.sqrt());
        let r = solve_bpdn(&a, &g, eta, &cfg()).unwrap();
        prop_assert!(r.converged);
        let residual = (&a * &r.solution - &g).norm();
        prop_assert!(residual <= eta + cfg().feas_tol * (1.0 + g.norm()));
        prop_assert!(r.objective <= c.to_dense().lp_norm(1) * (1.0 + 1e-6));
    }
}
