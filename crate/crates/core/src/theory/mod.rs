//! Restricted-eigenvalue tools, sample-complexity formulas and lemma checks.
//!
//! The complexity evaluators take the universal constant `C` as a parameter
//! (default 1); they are meant for scaling studies and monotonicity checks,
//! not for absolute sample counts.

mod complexity;
mod cone;
mod lemmas;
mod montecarlo;
mod special;

pub use complexity::{complexity_1d, complexity_bos, complexity_multi, l1_error_bound, nsp_constants, FixedPoint};
pub use cone::{cone_member, empirical_re_constant, sample_cone, sparse_min_eig, ConeVector, SparseMode};
pub use lemmas::{lemma_validators, write_report_csv, LemmaCheck, LemmaConfig, LemmaReport, Relation};
pub use montecarlo::McEstimate;
pub use special::{h_d, k_d, k_d_lower_bound, v_d_lower, v_d_mc, v_d_upper, v_1};

use crate::error::{Error, Result};

/// Parameters of the restricted-eigenvalue sample-complexity statements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct REParams {
    pub s: usize,
    /// Cone aperture, `> 1`.
    pub alpha: f64,
    pub delta: f64,
    /// Failure probability of the restricted-eigenvalue event.
    pub gamma: f64,
    /// Preferable-set level.
    pub gamma0: f64,
    /// Size of the index set.
    pub n: usize,
    pub d: usize,
    /// Stand-in for the non-explicit universal constant.
    pub c: f64,
}

impl Default for REParams {
    fn default() -> Self {
        REParams {
            s: 10,
            alpha: 2.0,
            delta: 0.5,
            gamma: 0.1,
            gamma0: 0.1,
            n: 200,
            d: 1,
            c: 1.0,
        }
    }
}

impl REParams {
    /// `1 / (1 + alpha)`.
    pub fn delta0(&self) -> f64 {
        1.0 / (1.0 + self.alpha)
    }

    /// `(1 + alpha)^2 s`.
    pub fn s_alpha(&self) -> f64 {
        (1.0 + self.alpha).powi(2) * self.s as f64
    }

    pub fn validate(&self) -> Result<()> {
        let open01 = |v: f64| v > 0.0 && v < 1.0;
        let problem = if self.s == 0 {
            Some("s must be >= 1")
        } else if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            Some("alpha must be > 1")
        } else if !open01(self.delta) {
            Some("delta must lie in (0,1)")
        } else if !open01(self.gamma) || !open01(self.gamma0) {
            Some("gamma and gamma0 must lie in (0,1)")
        } else if self.n == 0 || self.d == 0 {
            Some("N and d must be >= 1")
        } else if !(self.c > 0.0 && self.c.is_finite()) {
            Some("C must be > 0")
        } else {
            None
        };
        match problem {
            Some(p) => Err(Error::Domain(format!("{p} ({self:?})"))),
            None => Ok(()),
        }
    }

    /// The joint-probability condition `gamma + gamma0 < 1` of the
    /// uniform-sampling theorems.
    pub fn validate_joint(&self) -> Result<()> {
        self.validate()?;
        if self.gamma + self.gamma0 >= 1.0 {
            return Err(Error::Domain(format!(
                "gamma + gamma0 = {} must be < 1",
                self.gamma + self.gamma0
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta0_follows_alpha() {
        let mut p = REParams::default();
        assert_eq!(p.delta0(), 1.0 / 3.0);
        p.alpha = 3.0;
        assert_eq!(p.delta0(), 0.25);
        assert_eq!(p.s_alpha(), 160.0);
    }

    #[test]
    fn validation() {
        assert!(REParams::default().validate_joint().is_ok());
        let bad = REParams { alpha: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = REParams { gamma: 0.6, gamma0: 0.5, ..Default::default() };
        assert!(bad.validate().is_ok());
        assert!(bad.validate_joint().is_err());
        let bad = REParams { delta: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
