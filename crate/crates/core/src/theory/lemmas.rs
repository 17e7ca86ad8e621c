//! Monte Carlo checks of the envelope inequalities.
//!
//! Integrals of `Omega^2` and of the singular kernels have infinite variance
//! under the uniform measure, so they are estimated under the Chebyshev
//! (arcsine) measure with the likelihood ratio `prod (pi/2) sqrt(1 - y^2)`,
//! which makes every integrand bounded. A Chebyshev coordinate is
//! `y = cos(pi U)` and then `sqrt(1 - y^2) = sin(pi U)`.

use std::f64::consts::{E, FRAC_PI_2, PI};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use super::montecarlo::{mc_mean, McEstimate};
use super::special::{h_d, v_1, v_d_lower, v_d_mc, v_d_upper};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, label_key, Stream};
use crate::sampling::{draw_uniform, estimate_percentile_threshold, is_preferable_1d, reference_test_values};

const MIN_BUDGET: usize = 100_000;
const GOOD_SET_M: usize = 100;
const STABILITY_BAND: f64 = 0.2;

/// Sample budgets of [`lemma_validators`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaConfig {
    /// Points per integral or probability estimate.
    pub samples: usize,
    /// Sample sets per good-set frequency estimate.
    pub sets: usize,
    pub seed: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            samples: 1_000_000,
            sets: 100_000,
            seed: 2024,
        }
    }
}

/// How the estimate is compared with the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Upper bound: `lhs <= rhs + 3 sigma`.
    AtMost,
    /// Lower bound: `lhs + 3 sigma >= rhs`.
    AtLeast,
    /// Exact value: `|lhs - rhs| <= 3 sigma`.
    Matches,
    /// Report only.
    Reported,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Matches => "~=",
            Relation::Reported => "report",
        })
    }
}

/// One row of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub lemma: String,
    pub params: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub three_sigma: f64,
    /// `None` for rows that only report a value.
    pub pass: Option<bool>,
}

impl LemmaCheck {
    fn new(lemma: &str, params: String, relation: Relation, lhs: f64, rhs: f64, three_sigma: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => Some(lhs <= rhs + three_sigma),
            Relation::AtLeast => Some(lhs + three_sigma >= rhs),
            Relation::Matches => Some((lhs - rhs).abs() <= three_sigma),
            Relation::Reported => None,
        };
        LemmaCheck {
            lemma: lemma.to_string(),
            params,
            relation,
            lhs,
            rhs,
            three_sigma,
            pass,
        }
    }

    fn from_estimate(lemma: &str, params: String, relation: Relation, est: McEstimate, rhs: f64) -> Self {
        Self::new(lemma, params, relation, est.mean, rhs, est.half_width)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    /// Rows that carry a verdict.
    pub fn judged(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| c.pass.is_some())
    }

    pub fn all_pass(&self) -> bool {
        self.judged().all(|c| c.pass == Some(true))
    }

    pub fn by_lemma<'a>(&'a self, lemma: &'a str) -> impl Iterator<Item = &'a LemmaCheck> + 'a {
        self.checks.iter().filter(move |c| c.lemma == lemma)
    }
}

/// Writes the report as CSV with header
/// `lemma,params,relation,lhs,rhs,three_sigma,pass`.
pub fn write_report_csv(report: &LemmaReport, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "lemma,params,relation,lhs,rhs,three_sigma,pass")?;
        for c in &report.checks {
            let pass = match c.pass {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            writeln!(
                w,
                "{},{},{},{:e},{:e},{:e},{}",
                c.lemma, c.params, c.relation, c.lhs, c.rhs, c.three_sigma, pass
            )?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// `sqrt(1 - y^2)` of a Chebyshev-distributed coordinate.
#[inline]
fn cheb_cos(rng: &mut Stream) -> f64 {
    (PI * rng.random::<f64>()).sin()
}

#[inline]
fn uniform(rng: &mut Stream) -> f64 {
    rng.random_range(-1.0..1.0)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

struct Ctx {
    cfg: LemmaConfig,
}

impl Ctx {
    fn seed(&self, lemma: &str, case: u64) -> u64 {
        derive_seed(self.cfg.seed, &[label_key(lemma), case])
    }

    fn mc<F>(&self, lemma: &str, case: u64, f: F) -> McEstimate
    where
        F: Fn(&mut Stream) -> f64 + Sync,
    {
        mc_mean(self.cfg.samples, self.seed(lemma, case), f)
    }
}

/// Runs every check. Budgets below `10^5` are rejected.
pub fn lemma_validators(cfg: &LemmaConfig) -> Result<LemmaReport> {
    if cfg.samples < MIN_BUDGET || cfg.sets < MIN_BUDGET {
        return Err(Error::Budget(format!(
            "lemma checks need at least {MIN_BUDGET} samples and sets, got {} and {}",
            cfg.samples, cfg.sets
        )));
    }
    let ctx = Ctx { cfg: *cfg };
    let mut checks = Vec::new();
    tail_1d(&ctx, &mut checks);
    end_set_1d(&ctx, &mut checks);
    integral_1d(&ctx, &mut checks);
    tail_multi(&ctx, &mut checks)?;
    end_set_multi(&ctx, &mut checks)?;
    volume(&ctx, &mut checks)?;
    good_set_1d(&ctx, &mut checks)?;
    good_set_multi(&ctx, &mut checks)?;
    integral_multi(&ctx, &mut checks);
    Ok(LemmaReport { checks })
}

/// `P(Omega >= mu) <= 16 / (pi^2 mu^4)` for `d = 1`.
fn tail_1d(ctx: &Ctx, out: &mut Vec<LemmaCheck>) {
    for (case, mu) in [1.5f64, 2.0, 4.0].into_iter().enumerate() {
        let r = 16.0 / (PI * PI * mu.powi(4));
        // Omega(y) >= mu  <=>  1 - y^2 <= 16 / (pi^2 mu^4)
        let est = ctx.mc("tail_1d", case as u64, |rng| {
            let y = uniform(rng);
            f64::from((1.0 - y) * (1.0 + y) <= r)
        });
        out.push(LemmaCheck::from_estimate("tail_1d", format!("mu={mu}"), Relation::AtMost, est, r));
    }
}

/// `int_I Omega^2 drho <= 2 sqrt(mu)` whenever `rho(I) <= mu <= 1`. The
/// symmetric end set maximizes the left side among sets of measure `mu`;
/// the one-sided end `[1 - 2mu, 1]` is checked as well.
fn end_set_1d(ctx: &Ctx, out: &mut Vec<LemmaCheck>) {
    for (case, mu) in [0.01f64, 0.04, 0.25, 1.0].into_iter().enumerate() {
        // Omega^2 times the likelihood ratio is exactly 2.
        let est = ctx.mc("end_set_1d", case as u64, |rng| {
            let y = (PI * rng.random::<f64>()).cos();
            if y.abs() >= 1.0 - mu {
                2.0
            } else {
                0.0
            }
        });
        let params = format!("set=both_ends;mu={mu}");
        out.push(LemmaCheck::from_estimate("end_set_1d", params, Relation::AtMost, est, 2.0 * mu.sqrt()));
    }
    for (case, mu) in [0.04f64, 0.25].into_iter().enumerate() {
        let est = ctx.mc("end_set_1d", 100 + case as u64, |rng| {
            let y = (PI * rng.random::<f64>()).cos();
            if y >= 1.0 - 2.0 * mu {
                2.0
            } else {
                0.0
            }
        });
        let params = format!("set=right_end;mu={mu}");
        out.push(LemmaCheck::from_estimate("end_set_1d", params, Relation::AtMost, est, 2.0 * mu.sqrt()));
    }
}

const TAUS: [f64; 3] = [0.0, 0.25, 0.5];
const BETAS: [f64; 3] = [10.0, 50.0, 200.0];

/// `int exp(-beta sqrt(1-y^2)) / (1-y^2)^tau drho <= 2 Gamma(2 - 2tau) beta^(2tau - 2)`.
fn integral_1d(ctx: &Ctx, out: &mut Vec<LemmaCheck>) {
    for (i, tau) in TAUS.into_iter().enumerate() {
        for (j, beta) in BETAS.into_iter().enumerate() {
            let est = ctx.mc("integral_1d", (3 * i + j) as u64, |rng| {
                let c = cheb_cos(rng);
                FRAC_PI_2 * (-beta * c).exp() * c.powf(1.0 - 2.0 * tau)
            });
            let rhs = 2.0 * gamma(2.0 - 2.0 * tau) * beta.powf(2.0 * tau - 2.0);
            let params = format!("tau={tau};beta={beta}");
            out.push(LemmaCheck::from_estimate("integral_1d", params, Relation::AtMost, est, rhs));
        }
    }
}

/// Thresholds `mu = k 2^d / pi^(d/2)`, so that `r = 2^(4d) / (pi^(2d) mu^4) = k^-4`.
const MU_FACTORS: [f64; 3] = [1.5, 2.0, 4.0];

fn envelope_threshold(d: usize, k: f64) -> f64 {
    k * 2f64.powi(d as i32) / PI.powf(d as f64 / 2.0)
}

/// Two-sided estimate of `rho(Omega >= mu)` for `d >= 2`.
fn tail_multi(ctx: &Ctx, out: &mut Vec<LemmaCheck>) -> Result<()> {
    for d in [2usize, 3] {
        for (case, k) in MU_FACTORS.into_iter().enumerate() {
            let mu = envelope_threshold(d, k);
            let r = 2f64.powi(4 * d as i32) / (PI.powi(2 * d as i32) * mu.powi(4));
            let est = ctx.mc("tail_multi", (10 * d + case) as u64, |rng| {
                let p: f64 = (0..d).map(|_| {
                    let y = uniform(rng);
                    (1.0 - y) * (1.0 + y)
                }).product();
                f64::from(p <= r)
            });
            let fact = factorial(d - 1);
            let lower = h_d(r, d)? / (2f64.powi(d as i32) * fact);
            let upper_arg = 2f64.powi(2 * d as i32) / (E * E * PI.powi(2 * d as i32) * mu.powi(4));
            let upper = 2f64.powi(d as i32 + 1) * E * E / fact * h_d(upper_arg, d)?;
            let params = format!("d={d};mu={mu:.6}");
            out.push(LemmaCheck::from_estimate("tail_multi_lower", params.clone(), Relation::AtLeast, est, lower));
            out.push(LemmaCheck::from_estimate("tail_multi_upper", params, Relation::AtMost, est, upper));
        }
    }
    Ok(())
}

/// `int_{Omega >= mu} Omega^2 drho <= 2^(4d) (d+1) / (pi^(2d) (d-1)!) log(e pi^d mu^2)^(d-1) / mu^2`.
fn end_set_multi(ctx: &Ctx, out: &mut Vec<LemmaCheck>) -> Result<()> {
    for d in [2usize, 3] {
        for (case, k) in MU_FACTORS.into_iter().enumerate() {
            let mu = envelope_threshold(d, k);
            let r = k.powi(-4);
            let scale = 2f64.powi(d as i32);
            // Omega^2 times the likelihood ratio is 2^d.
            let est = ctx.mc("end_set_multi", (10 * d + case) as u64, |rng| {
                let p: f64 = (0..d).map(|_| cheb_cos(rng).powi(2)).product();
                if p <= r {
                    scale
                } else {
                    0.0
                }
            });
            let di = d as i32;
            let rhs = 2f64.powi(4 * di) * (d as f64 + 1.0) / (PI.powi(2 * di) * factorial(d - 1))
                * (E * PI.powi(di) * mu * mu).ln().powi(di - 1)
                / (mu * mu);
            if !rhs.is_finite() {
                return Err(Error::Domain(format!("end set bound undefined at mu = {mu}")));
            }
            let params = format!("d={d};mu={mu:.6}");
            out.push(LemmaCheck::from_estimate("end_set_multi", params, Relation::AtMost, est, rhs));
        }
    }
    Ok(())
}

/// `v_d(r)` between its printed bounds, and `v_1` against its closed form.
fn volume(ctx: &Ctx, out: &mut Vec<LemmaCheck>) -> Result<()> {
    for d in 1..=3usize {
        for (case, r) in [0.01, 0.1, 0.5].into_iter().enumerate() {
            let est = v_d_mc(r, d, ctx.cfg.samples, ctx.seed("volume", (10 * d + case) as u64))?;
            let params = format!("d={d};r={r}");
            out.push(LemmaCheck::from_estimate("volume_lower", params.clone(), Relation::AtLeast, est, v_d_lower(r, d)?));
            out.push(LemmaCheck::from_estimate("volume_upper", params.clone(), Relation::AtMost, est, v_d_upper(r, d)?));
            if d == 1 {
                out.push(LemmaCheck::from_estimate("volume_exact", params, Relation::Matches, est, v_1(r)?));
            }
        }
    }
    Ok(())
}

/// Preferable-set frequency under the analytic univariate criterion, and
/// the moment bounds behind it.
fn good_set_1d(ctx: &Ctx, out: &mut Vec<LemmaCheck>) -> Result<()> {
    let m = GOOD_SET_M;
    for (case, g0) in [0.5, 0.8].into_iter().enumerate() {
        let seed = ctx.seed("good_set_1d", case as u64);
        let accepted = (0..ctx.cfg.sets as u64)
            .into_par_iter()
            .map(|i| {
                let q = draw_uniform(m, 1, derive_seed(seed, &[i]))?;
                Ok(usize::from(is_preferable_1d(&q, g0)?))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        let n = ctx.cfg.sets as f64;
        let freq = accepted as f64 / n;
        let three_sigma = 3.0 * (g0 * (1.0 - g0) / n).sqrt();
        let params = format!("m={m};gamma0={g0}");
        out.push(LemmaCheck::new("good_set_1d", params.clone(), Relation::AtLeast, freq, 1.0 - g0, three_sigma));

        let scale = (m as f64 / g0).sqrt();
        let omega = |c: f64| 2.0 / PI.sqrt() / c.sqrt();
        let ez = ctx.mc("good_set_moments_1d", 2 * case as u64, |rng| {
            let c = cheb_cos(rng);
            let w = omega(c);
            w * (-scale / (2.0 * w * w)).exp() * FRAC_PI_2 * c
        });
        let ez2 = ctx.mc("good_set_moments_1d", 2 * case as u64 + 1, |rng| {
            let c = cheb_cos(rng);
            let w = omega(c);
            2.0 * (-scale / (w * w)).exp()
        });
        let ratio = g0 / m as f64;
        let rhs1 = 2f64.powf(5.5) / (PI * PI.sqrt()) * ratio.powf(0.75);
        let rhs2 = 32.0 / (PI * PI) * ratio.sqrt();
        out.push(LemmaCheck::from_estimate("good_set_mean_1d", params.clone(), Relation::AtMost, ez, rhs1));
        out.push(LemmaCheck::from_estimate("good_set_second_moment_1d", params, Relation::AtMost, ez2, rhs2));
    }
    Ok(())
}

/// Percentile criterion in `d = 2`: threshold from one batch of reference
/// sets, acceptance frequency on an independent batch. The 3 sigma band
/// covers both batches plus the quantile interpolation step `1 / n_ref`.
fn good_set_multi(ctx: &Ctx, out: &mut Vec<LemmaCheck>) -> Result<()> {
    let (m, d) = (GOOD_SET_M, 2);
    let n = ctx.cfg.sets;
    for (case, g0) in [0.5, 0.8].into_iter().enumerate() {
        let threshold = estimate_percentile_threshold(m, d, g0, n, ctx.seed("good_set_multi_ref", case as u64))?;
        let fresh = reference_test_values(m, d, g0, n, ctx.seed("good_set_multi_fresh", case as u64))?;
        let freq = fresh.iter().filter(|&&t| t <= threshold).count() as f64 / n as f64;
        let p = 1.0 - g0;
        let nf = n as f64;
        let three_sigma = 3.0 * (p * (1.0 - p) * (2.0 / nf)).sqrt() + 1.0 / nf;
        let params = format!("d={d};m={m};gamma0={g0}");
        out.push(LemmaCheck::new("good_set_multi", params, Relation::Matches, freq, p, three_sigma));
    }
    Ok(())
}

/// Implied constant `C = LHS / (beta^(2tau-2) log(beta)^(d-1))` of the
/// multivariate integral bound, with a stability row per `tau` for `d = 2`:
/// the largest relative deviation from the mean over `beta`.
fn integral_multi(ctx: &Ctx, out: &mut Vec<LemmaCheck>) {
    for d in [2usize, 3] {
        for (i, tau) in TAUS.into_iter().enumerate() {
            let mut values = Vec::new();
            for (j, beta) in BETAS.into_iter().enumerate() {
                let est = ctx.mc("integral_multi", (100 * d + 3 * i + j) as u64, |rng| {
                    let mut prod = 1.0;
                    let mut weight = 1.0;
                    for _ in 0..d {
                        let c = cheb_cos(rng);
                        prod *= c;
                        weight *= FRAC_PI_2 * c.powf(1.0 - 2.0 * tau);
                    }
                    (-beta * prod).exp() * weight
                });
                let norm = beta.powf(2.0 * tau - 2.0) * beta.ln().powi(d as i32 - 1);
                let c_hat = est.mean / norm;
                let sigma = est.half_width / norm;
                values.push((c_hat, sigma));
                let params = format!("d={d};tau={tau};beta={beta}");
                out.push(LemmaCheck::new("integral_multi_constant", params, Relation::Reported, c_hat, f64::NAN, sigma));
            }
            let mean = values.iter().map(|v| v.0).sum::<f64>() / values.len() as f64;
            let spread = values.iter().map(|v| (v.0 / mean - 1.0).abs()).fold(0.0, f64::max);
            let slack = values.iter().map(|v| v.1 / mean).fold(0.0, f64::max);
            let params = format!("d={d};tau={tau}");
            let relation = if d == 2 { Relation::AtMost } else { Relation::Reported };
            out.push(LemmaCheck::new("integral_multi_stability", params, relation, spread, STABILITY_BAND, slack));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_budgets() {
        let cfg = LemmaConfig { samples: 10, ..Default::default() };
        assert!(matches!(lemma_validators(&cfg), Err(Error::Budget(_))));
    }

    #[test]
    fn relation_verdicts() {
        let c = LemmaCheck::new("x", String::new(), Relation::AtMost, 1.05, 1.0, 0.1);
        assert_eq!(c.pass, Some(true));
        let c = LemmaCheck::new("x", String::new(), Relation::AtLeast, 0.8, 1.0, 0.1);
        assert_eq!(c.pass, Some(false));
        let c = LemmaCheck::new("x", String::new(), Relation::Reported, 0.8, f64::NAN, 0.1);
        assert_eq!(c.pass, None);
    }
}
