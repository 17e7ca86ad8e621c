use std::f64::consts::E;

use rand::Rng;

use super::montecarlo::{mc_mean, McEstimate};
use crate::error::{Error, Result};

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("d = {d} must be >= 2")));
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `H_d(beta) = beta log(1/beta)^(d-1)` for `0 < beta < 1`.
pub fn h_d(beta: f64, d: usize) -> Result<f64> {
    check_d(d)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("H_d needs 0 < beta < 1, got {beta}")));
    }
    Ok(beta * (1.0 / beta).ln().powi(d as i32 - 1))
}

/// Inverse of `H_d` on its increasing branch `(0, e^{-(d-1)}]`, defined for
/// `0 < M <= ((d-1)/e)^(d-1)`. Bisection runs until the bracket cannot
/// shrink further.
pub fn k_d(m: f64, d: usize) -> Result<f64> {
    check_d(d)?;
    let k = (d - 1) as f64;
    let top = (k / E).powf(k);
    if !(m > 0.0 && m <= top) {
        return Err(Error::Domain(format!(
            "K_{d} is defined on (0, {top}], got M = {m}"
        )));
    }
    let h = |b: f64| b * (1.0 / b).ln().powf(k);
    let mut hi = (-k).exp();
    if m >= h(hi) {
        return Ok(hi);
    }
    let mut lo = 1e-300;
    if m <= h(lo) {
        return Ok(lo);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if m - h(lo) <= h(hi) - m { lo } else { hi })
}

/// Lower estimate
/// `K_d(M) >= M/(d-1)^(d-1) exp(-(d-1) sqrt(log((d-1)/M^(1/(d-1)))))`.
pub fn k_d_lower_bound(m: f64, d: usize) -> Result<f64> {
    check_d(d)?;
    let k = (d - 1) as f64;
    if !(m > 0.0 && m < (k / E).powf(k)) {
        return Err(Error::Domain(format!("M = {m} outside the range of K_{d}")));
    }
    let inner = (k / m.powf(1.0 / k)).ln();
    Ok(m / k.powf(k) * (-k * inner.sqrt()).exp())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("r = {r} must lie in (0, 1]")));
    }
    Ok(())
}

/// `v_1(r) = 1 - sqrt(1 - r)`.
pub fn v_1(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(1.0 - (1.0 - r).sqrt())
}

/// Lower bound `r / (2 (d-1)!) log(1/sqrt(r))^(d-1)` on `v_d(r)`.
pub fn v_d_lower(r: f64, d: usize) -> Result<f64> {
    check_r(r)?;
    let k = d.saturating_sub(1);
    Ok(r / (2.0 * factorial(k)) * (1.0 / r.sqrt()).ln().powi(k as i32))
}

/// Upper bound `r / (d-1)! log(2^d e / sqrt(r))^(d-1)` on `v_d(r)`.
pub fn v_d_upper(r: f64, d: usize) -> Result<f64> {
    check_r(r)?;
    let k = d.saturating_sub(1);
    Ok(r / factorial(k) * (2f64.powi(d as i32) * E / r.sqrt()).ln().powi(k as i32))
}

/// Monte Carlo estimate of `v_d(r)`, the uniform measure of
/// `{y in [-1,1]^d : prod (1 - y_k^2) <= r}`.
pub fn v_d_mc(r: f64, d: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_r(r)?;
    if d == 0 {
        return Err(Error::Domain("d must be >= 1".into()));
    }
    if n_samples < 10_000 {
        return Err(Error::InvalidInput(format!("need at least 1e4 samples, got {n_samples}")));
    }
    Ok(mc_mean(n_samples, seed, |rng| {
        let mut p = 1.0;
        for _ in 0..d {
            let y: f64 = rng.random_range(-1.0..1.0);
            p *= 1.0 - y * y;
        }
        if p <= r {
            1.0
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn h_values() {
        assert_relative_eq!(h_d(1.0 / E, 2).unwrap(), 1.0 / E, epsilon = 1e-15);
        assert_relative_eq!(h_d(1.0 / E, 3).unwrap(), 1.0 / E, epsilon = 1e-15);
        assert_relative_eq!(h_d(0.01, 2).unwrap(), 0.046_051_701_859_880_91, epsilon = 1e-15);
        assert!(h_d(1.0, 2).is_err());
        assert!(h_d(0.5, 1).is_err());
    }

    #[test]
    fn k_inverse() {
        assert_relative_eq!(k_d(1.0 / E, 2).unwrap(), 1.0 / E, epsilon = 1e-15);
        for d in 2..=4 {
            for m in [1e-12, 1e-6, 1e-3, 0.05, 0.2] {
                let b = k_d(m, d).unwrap();
                assert!((h_d(b, d).unwrap() - m).abs() <= 1e-10 * m.max(1e-6));
            }
        }
        assert!(k_d(0.5, 2).is_err());
        assert!(k_d(0.0, 2).is_err());
    }

    #[test]
    fn volume_one_dimensional() {
        for r in [0.01, 0.3, 1.0] {
            let lo = v_d_lower(r, 1).unwrap();
            let hi = v_d_upper(r, 1).unwrap();
            let v = v_1(r).unwrap();
            assert!(lo <= v && v <= hi);
        }
        let est = v_d_mc(0.3, 1, 200_000, 5).unwrap();
        assert!(est.contains(v_1(0.3).unwrap()), "{est:?}");
        assert_eq!(v_d_mc(1.0, 3, 10_000, 1).unwrap().mean, 1.0);
        assert!(v_d_mc(0.3, 1, 100, 5).is_err());
    }
}
