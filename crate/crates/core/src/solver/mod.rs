//! l1 minimization (basis pursuit and its noise-constrained variant), an
//! exhaustive sparse oracle for tiny instances, and recovery metrics.

mod admm;
mod oracle;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::measurement::SparseSignal;
use crate::rng::stream;

pub use admm::{solve_bp, solve_bpdn};
pub use oracle::{l0_oracle, ORACLE_MAX_N, ORACLE_MAX_S};

/// Iteration limits and tolerances shared by [`solve_bp`] and [`solve_bpdn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Constraint violation, relative to `1 + ||g||`.
    pub feas_tol: f64,
    /// Objective stagnation and duality gap, relative to `1 + objective`.
    pub gap_tol: f64,
    /// Scales the initial threshold derived from the operator norm.
    pub step_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 50_000,
            feas_tol: 1e-9,
            gap_tol: 1e-10,
            step_scale: 0.99,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters >= 1
            && self.feas_tol > 0.0
            && self.gap_tol > 0.0
            && self.step_scale > 0.0
            && self.step_scale <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid solver config {self:?}")))
        }
    }
}

/// Why an iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Closed-form answer (zero data, or zero feasible).
    Trivial,
    /// A polished support solution was certified optimal by a dual vector.
    Certified,
    /// Feasible and the objective stopped moving.
    Stagnated,
    MaxIters,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub solution: DVector<f64>,
    pub iterations: usize,
    /// `||A x - g||_2` for BP; for BPDN the excess `max(0, ||A x - g|| - eta)`.
    pub primal_residual: f64,
    /// `||x||_1`.
    pub objective: f64,
    pub converged: bool,
    pub stop: StopReason,
    pub diagnostic: Option<String>,
}

/// Componentwise `sign(v) max(|v| - t, 0)`.
pub fn soft_threshold(v: &DVector<f64>, t: f64) -> DVector<f64> {
    v.map(|x| soft(x, t))
}

#[inline]
pub(crate) fn soft(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// `sigma_s(z)_1`: l1 norm of everything except the `s` largest magnitudes.
pub fn best_s_term_error(z: &[f64], s: usize) -> f64 {
    let mut mags: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    mags.iter().skip(s).sum()
}

/// Power-iteration estimate of `||A||_2`, inflated by 1%.
pub fn operator_norm_estimate(a: &DMatrix<f64>, iters: usize, seed: u64) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let mut rng = stream(seed);
    let mut v = DVector::from_fn(a.ncols(), |_, _| rng.random::<f64>() - 0.5);
    let mut sigma = 0.0;
    for _ in 0..iters.max(1) {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v /= norm;
        let av = a * &v;
        sigma = av.norm();
        v = a.tr_mul(&av);
    }
    1.01 * sigma
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryMetrics {
    pub rel_l2: f64,
    pub rel_l1: f64,
    pub success: bool,
}

/// Relative errors of a recovered vector against the ground truth.
///
/// When `c = 0` the errors are absolute norms of the estimate. Success is
/// `rel_l2 <= success_tol` (closed).
pub fn recovery_metrics(
    c: &SparseSignal,
    result: &RecoveryResult,
    success_tol: f64,
) -> Result<RecoveryMetrics> {
    let est = &result.solution;
    if est.len() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            found: est.len(),
        });
    }
    let diff = est - c.to_dense();
    let (c2, c1) = (
        c.values().iter().map(|v| v * v).sum::<f64>().sqrt(),
        c.values().iter().map(|v| v.abs()).sum::<f64>(),
    );
    let rel = |num: f64, den: f64| if den > 0.0 { num / den } else { num };
    let rel_l2 = rel(diff.norm(), c2);
    let rel_l1 = rel(diff.lp_norm(1), c1);
    Ok(RecoveryMetrics {
        rel_l2,
        rel_l1,
        success: rel_l2 <= success_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn result_of(v: Vec<f64>) -> RecoveryResult {
        let solution = DVector::from_vec(v);
        RecoveryResult {
            objective: solution.lp_norm(1),
            solution,
            iterations: 0,
            primal_residual: 0.0,
            converged: true,
            stop: StopReason::Trivial,
            diagnostic: None,
        }
    }

    #[test]
    fn best_s_term() {
        assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 1), 3.0);
        assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 3), 0.0);
        assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 0), 6.0);
        assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 7), 0.0);
    }

    #[test]
    fn metrics() {
        let c = SparseSignal::new(4, vec![(1, 2.0), (3, -1.0)], 0).unwrap();
        let exact = recovery_metrics(&c, &result_of(vec![0.0, 2.0, 0.0, -1.0]), 1e-4).unwrap();
        assert_eq!(exact, RecoveryMetrics { rel_l2: 0.0, rel_l1: 0.0, success: true });
        let zero = recovery_metrics(&c, &result_of(vec![0.0; 4]), 1e-4).unwrap();
        assert_eq!(zero.rel_l2, 1.0);
        assert_eq!(zero.rel_l1, 1.0);
        assert!(!zero.success);
        let half = recovery_metrics(&c, &result_of(vec![0.0, 1.0, 0.0, -0.5]), 0.5).unwrap();
        assert_eq!(half.rel_l2, 0.5);
        assert!(half.success);
        assert!(recovery_metrics(&c, &result_of(vec![0.0; 3]), 0.5).is_err());
        let empty = SparseSignal::new(2, vec![], 0).unwrap();
        let m = recovery_metrics(&empty, &result_of(vec![0.0, 0.0]), 1e-4).unwrap();
        assert_eq!((m.rel_l2, m.success), (0.0, true));
    }

    #[test]
    fn soft_threshold_values() {
        let v = DVector::from_vec(vec![3.0, -0.5, 0.5, -2.0]);
        assert_eq!(soft_threshold(&v, 1.0).as_slice(), &[2.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn operator_norm() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 0.5]));
        let est = operator_norm_estimate(&a, 50, 1);
        assert_relative_eq!(est, 3.03, epsilon = 1e-6);
        assert_eq!(operator_norm_estimate(&DMatrix::zeros(2, 3), 20, 1), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig { step_scale: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { max_iters: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
