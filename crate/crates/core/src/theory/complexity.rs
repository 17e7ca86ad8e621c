use std::f64::consts::PI;

use super::REParams;
use crate::error::{Error, Result};

const FIXED_POINT_MAX_ITERS: usize = 200;
const FIXED_POINT_RTOL: f64 = 1e-9;
const FIXED_POINT_RESIDUAL: f64 = 1e-8;

/// Null-space constants `(rho, tau) = (1/alpha, 1/sqrt(1 - delta))` implied
/// by the restricted eigenvalue property.
pub fn nsp_constants(alpha: f64, delta: f64) -> Result<(f64, f64)> {
    check_alpha_delta(alpha, delta)?;
    Ok((1.0 / alpha, 1.0 / (1.0 - delta).sqrt()))
}

/// l1 recovery error bound for noise-constrained basis pursuit under the
/// null space property:
/// `2/(1-2 d0) sigma_s + 4/sqrt(1-delta) (1-d0)/(1-2 d0) eta sqrt(s)`
/// with `d0 = 1/(1+alpha)`.
pub fn l1_error_bound(sigma_s: f64, eta: f64, s: usize, alpha: f64, delta: f64) -> Result<f64> {
    check_alpha_delta(alpha, delta)?;
    if !(sigma_s >= 0.0 && eta >= 0.0) {
        return Err(Error::Domain(format!("sigma_s = {sigma_s} and eta = {eta} must be >= 0")));
    }
    let d0 = 1.0 / (1.0 + alpha);
    let head = 2.0 / (1.0 - 2.0 * d0) * sigma_s;
    let noise = 4.0 / (1.0 - delta).sqrt() * (1.0 - d0) / (1.0 - 2.0 * d0) * eta * (s as f64).sqrt();
    Ok(head + noise)
}

fn check_alpha_delta(alpha: f64, delta: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha = {alpha} must be > 1")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (0,1)")));
    }
    Ok(())
}

/// `ln(x)` for a log factor that must be positive.
fn pos_log(x: f64, what: &str) -> Result<f64> {
    if x > 1.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(Error::Domain(format!("log argument {what} = {x:e} must exceed 1")))
    }
}

/// Sample count for the restricted eigenvalue property of univariate
/// Legendre matrices under uniform sampling:
///
/// `C (1+a)^4 s^2 max{ d^-12 g0^-1 L^2 log^2(2N), d^-7.5 L^1.5 log(2N),
///  d^-4 L log(L / (g d)) }`, `L = log((1+a)^2 s / d^1.5)`.
///
/// With `prefset` the success probability is conditioned on a preferable
/// set and `g` becomes `(1 - g0) g`.
pub fn complexity_1d(p: &REParams, prefset: bool) -> Result<f64> {
    if prefset {
        p.validate()?;
    } else {
        p.validate_joint()?;
    }
    let delta = p.delta;
    let l = pos_log(p.s_alpha() / delta.powf(1.5), "s_alpha / delta^1.5")?;
    let log2n = (2.0 * p.n as f64).ln();
    let gamma = if prefset { (1.0 - p.gamma0) * p.gamma } else { p.gamma };
    let inner = pos_log(l / (gamma * delta), "log(s_alpha,delta) / (gamma delta)")?;
    let t1 = delta.powi(-12) / p.gamma0 * l * l * log2n * log2n;
    let t2 = delta.powf(-7.5) * l.powf(1.5) * log2n;
    let t3 = delta.powi(-4) * l * inner;
    let s = p.s as f64;
    Ok(p.c * (1.0 + p.alpha).powi(4) * s * s * t1.max(t2).max(t3))
}

/// Fixed point of the multivariate sample-count condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub m: f64,
    pub iterations: usize,
    /// `|m - RHS(m)| / m` at the returned `m`.
    pub residual: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Constants `C_{d,1..4}` of the multivariate condition.
fn multi_constants(c: f64, d: usize) -> [f64; 4] {
    let di = d as i32;
    let df = d as f64;
    let fact = factorial(d - 1);
    let c1 = c * (4.0 / PI).powi(4 * di);
    let c2 = c * (df + 1.0) / fact.sqrt() * (64.0 * 2f64.sqrt() / (PI * PI)).powi(di);
    let c3 = c * (df + 1.0) / fact * (4.0 / PI).powi(2 * di);
    let c4 = c * (df + 1.0) * (df - 1.0).powi(di - 1) / fact * 2f64.powi(4 * di) / PI.powf(1.5 * df);
    [c1, c2, c3, c4]
}

/// Right-hand side of the multivariate condition at a trial `m`.
fn multi_rhs(p: &REParams, gamma: f64, m: f64) -> Result<f64> {
    let d = p.d;
    let di = d as i32;
    let [c1, c2, c3, c4] = multi_constants(p.c, d);
    let delta = p.delta;
    let sa = p.s_alpha();
    let lx = pos_log(c4 * sa.powf(1.5) / (delta * delta), "C_d4 s_alpha^1.5 / delta^2")?;
    let log2n = (2.0 * p.n as f64).ln();
    let inner = pos_log(lx / (gamma * delta), "log(C_d4 s_alpha^1.5 / delta^2) / (gamma delta)")?;
    // The m-dependent factors carry exponent 0 when d = 1.
    let (f1, f2, f3) = if d == 1 {
        (1.0, 1.0, 1.0)
    } else {
        let a1 = pos_log((PI / 4.0).powi(di) * (m / p.gamma0).sqrt(), "(pi/4)^d sqrt(m / gamma0)")?;
        let a2 = pos_log(p.c * m * (PI / 4.0).powi(di), "C m (pi/4)^d")?;
        let a3 = pos_log(p.c * PI.powi(di) * m, "C pi^d m")?;
        (a1.powi(4 * di - 4), a2.powi(di - 1), a3.powi(di - 1))
    };
    let t1 = c1 / (delta.powi(12) * p.gamma0) * lx * lx * log2n * log2n * f1;
    let t2 = c2 / delta.powf(7.5) * lx.powf(1.5) * log2n * f2;
    let t3 = c3 / delta.powi(4) * lx * inner * f3;
    Ok(sa * sa * t1.max(t2).max(t3))
}

/// Sample count for the restricted eigenvalue property of `d`-variate
/// Legendre matrices under uniform sampling. The condition involves `m` on
/// both sides through log factors; it is solved by fixed-point iteration
/// from `m = s_alpha^2`.
pub fn complexity_multi(p: &REParams, prefset: bool) -> Result<FixedPoint> {
    if prefset {
        p.validate()?;
    } else {
        p.validate_joint()?;
    }
    let gamma = if prefset { (1.0 - p.gamma0) * p.gamma } else { p.gamma };
    let mut m = p.s_alpha().powi(2);
    for it in 1..=FIXED_POINT_MAX_ITERS {
        let next = multi_rhs(p, gamma, m)?;
        let change = (next - m).abs() / next;
        m = next;
        if change <= FIXED_POINT_RTOL {
            let residual = (m - multi_rhs(p, gamma, m)?).abs() / m;
            if residual <= FIXED_POINT_RESIDUAL {
                return Ok(FixedPoint { m, iterations: it, residual });
            }
        }
    }
    Err(Error::NonConvergence(format!(
        "multivariate sample count fixed point did not settle in {FIXED_POINT_MAX_ITERS} iterations (last m = {m:e})"
    )))
}

/// Classical bounded-orthonormal-system sample count with uniform bound
/// `theta`:
///
/// `C X log(X) max{ 2^5/d^4 log(40 X log X) log(4N), 1/d log(log(X)/(g d)) }`
/// with `X = theta^2 (1+a)^2 s / d^2`.
pub fn complexity_bos(p: &REParams, theta: f64) -> Result<f64> {
    p.validate()?;
    if !(theta >= 1.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("theta = {theta} must be >= 1")));
    }
    let delta = p.delta;
    let x = theta * theta * p.s_alpha() / (delta * delta);
    let lx = pos_log(x, "theta^2 s_alpha / delta^2")?;
    let t1 = 32.0 / delta.powi(4) * pos_log(40.0 * x * lx, "40 X log X")? * (4.0 * p.n as f64).ln();
    let t2 = pos_log(lx / (p.gamma * delta), "log(X) / (gamma delta)")? / delta;
    Ok(p.c * x * lx * t1.max(t2))
}
