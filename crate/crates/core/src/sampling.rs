//! Random sample sets, their test values and preferable-set selection.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::distr::{Distribution as _, Open01};
use rand::Rng;
use rayon::prelude::*;

use crate::basis::{envelope_coords, Point};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};

/// Sampling measure a set was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    /// Uniform on `[-1, 1]^d`.
    Uniform,
    /// Product arcsine density `prod_k 1 / (pi sqrt(1 - y_k^2))`.
    Chebyshev,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Chebyshev => "chebyshev",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(Distribution::Uniform),
            "chebyshev" => Ok(Distribution::Chebyshev),
            other => Err(Error::InvalidInput(format!("unknown distribution {other:?}"))),
        }
    }
}

/// `m` points in `[-1, 1]^d` with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    coords: Vec<f64>,
    m: usize,
    dim: usize,
    distribution: Distribution,
    seed: u64,
    cached: Option<(f64, f64)>,
}

impl SampleSet {
    /// Wraps explicit points (row-major, `m * d` coordinates).
    pub fn from_coords(
        coords: Vec<f64>,
        dim: usize,
        distribution: Distribution,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates cannot form points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|y| !y.is_finite() || y.abs() > 1.0) {
            return Err(Error::Domain(format!("sample coordinate {bad} is outside [-1, 1]")));
        }
        Ok(SampleSet {
            m: coords.len() / dim,
            coords,
            dim,
            distribution,
            seed,
            cached: None,
        })
    }

    pub fn from_points(points: &[Point], distribution: Distribution, seed: u64) -> Result<Self> {
        let dim = points.first().map(Point::dim).unwrap_or(0);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_coords(coords, dim, distribution, seed)
    }

    /// Number of points.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn distribution(&self) -> Distribution {
        self.distribution
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Cached test value, if one was computed for this `gamma0`.
    pub fn cached_test_value(&self, gamma0: f64) -> Option<f64> {
        self.cached
            .and_then(|(g, v)| (g.to_bits() == gamma0.to_bits()).then_some(v))
    }

    /// `(gamma0, T(Q))` of the last scoring, if any.
    pub fn cached(&self) -> Option<(f64, f64)> {
        self.cached
    }

    /// Concatenates two sets of the same dimension. The result carries the
    /// provenance of `self` and no cached score.
    pub fn concat(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        SampleSet::from_coords(coords, self.dim, self.distribution, self.seed)
    }
}

fn check_sizes(m: usize, d: usize) -> Result<()> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidInput(format!("need m >= 1 and d >= 1, got m={m}, d={d}")));
    }
    Ok(())
}

/// `m` i.i.d. uniform points on `[-1, 1]^d`: each coordinate is `2u - 1`
/// with `u` the standard 53-bit uniform on `[0, 1)` of the seed's stream.
pub fn draw_uniform(m: usize, d: usize, seed: u64) -> Result<SampleSet> {
    check_sizes(m, d)?;
    let mut rng = stream(seed);
    let coords = (0..m * d)
        .map(|_| 2.0 * rng.random::<f64>() - 1.0)
        .collect();
    SampleSet::from_coords(coords, d, Distribution::Uniform, seed)
}

/// `m` i.i.d. points with arcsine marginals, realized as `cos(pi u)` with
/// `u` uniform on the open interval `(0, 1)`.
pub fn draw_chebyshev(m: usize, d: usize, seed: u64) -> Result<SampleSet> {
    check_sizes(m, d)?;
    let mut rng = stream(seed);
    let coords = (0..m * d)
        .map(|_| {
            let u: f64 = Open01.sample(&mut rng);
            (PI * u).cos()
        })
        .collect();
    SampleSet::from_coords(coords, d, Distribution::Chebyshev, seed)
}

/// Draws from either measure.
pub fn draw(distribution: Distribution, m: usize, d: usize, seed: u64) -> Result<SampleSet> {
    match distribution {
        Distribution::Uniform => draw_uniform(m, d, seed),
        Distribution::Chebyshev => draw_chebyshev(m, d, seed),
    }
}

/// Test value `T(Q) = sum_i Z_i` with its per-sample terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TestStatistic {
    pub gamma0: f64,
    pub value: f64,
    pub per_sample: Vec<f64>,
}

fn check_gamma0(gamma0: f64) -> Result<()> {
    if !(gamma0 > 0.0 && gamma0 < 1.0) {
        return Err(Error::Domain(format!("gamma0 = {gamma0} must lie in (0, 1)")));
    }
    Ok(())
}

/// `Z = Omega exp(-sqrt(m / gamma0) / (2 Omega^2))` at one point.
///
/// `Z` increases with `Omega`, so it grows toward the boundary of the cube;
/// on the boundary itself `Omega` and `Z` are `+inf`.
pub fn sample_weight(y: &[f64], m: usize, gamma0: f64) -> f64 {
    match envelope_coords(y) {
        Ok(omega) => {
            let scale = (m as f64 / gamma0).sqrt();
            omega * (-scale / (2.0 * omega * omega)).exp()
        }
        Err(_) => f64::INFINITY,
    }
}

/// Scores a set without touching its cache.
pub fn compute_test_value(q: &SampleSet, gamma0: f64) -> Result<TestStatistic> {
    check_gamma0(gamma0)?;
    let per_sample: Vec<f64> = q.points().map(|y| sample_weight(y, q.m, gamma0)).collect();
    Ok(TestStatistic {
        gamma0,
        value: per_sample.iter().sum(),
        per_sample,
    })
}

/// Scores a set and caches `T(Q)` on it.
pub fn test_value(q: &mut SampleSet, gamma0: f64) -> Result<TestStatistic> {
    let stat = compute_test_value(q, gamma0)?;
    q.cached = Some((gamma0, stat.value));
    Ok(stat)
}

fn score(q: &SampleSet, gamma0: f64) -> Result<f64> {
    match q.cached_test_value(gamma0) {
        Some(v) => Ok(v),
        None => Ok(compute_test_value(q, gamma0)?.value),
    }
}

/// Univariate acceptance threshold
/// `32 sqrt2 / (pi sqrt pi) m^(1/4) g^(3/4) + 4 sqrt2 / pi m^(1/4) g^(-1/4)`.
pub fn preferable_threshold_1d(m: usize, gamma0: f64) -> Result<f64> {
    check_gamma0(gamma0)?;
    if m == 0 {
        return Err(Error::InvalidInput("m must be >= 1".into()));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let m4 = (m as f64).powf(0.25);
    Ok(32.0 * sqrt2 / (PI * PI.sqrt()) * m4 * gamma0.powf(0.75)
        + 4.0 * sqrt2 / PI * m4 * gamma0.powf(-0.25))
}

/// Analytic preferable-set test for univariate sets.
pub fn is_preferable_1d(q: &SampleSet, gamma0: f64) -> Result<bool> {
    if q.dim != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: q.dim,
        });
    }
    Ok(score(q, gamma0)? <= preferable_threshold_1d(q.m, gamma0)?)
}

/// Test values of `n_ref` independent uniform sets; set `i` uses the seed
/// `derive_seed(seed, [i])`.
pub fn reference_test_values(
    m: usize,
    d: usize,
    gamma0: f64,
    n_ref: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_gamma0(gamma0)?;
    (0..n_ref as u64)
        .into_par_iter()
        .map(|i| {
            let q = draw_uniform(m, d, derive_seed(seed, &[i]))?;
            Ok(compute_test_value(&q, gamma0)?.value)
        })
        .collect()
}

/// Empirical `p`-quantile with linear interpolation between order
/// statistics at position `(n - 1) p`.
pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("quantile of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        return Ok(v[lo]);
    }
    Ok(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

/// Percentile threshold of the multivariate preferable-set definition:
/// the `(1 - gamma0)`-quantile of `T` over `n_ref` fresh uniform sets.
pub fn estimate_percentile_threshold(
    m: usize,
    d: usize,
    gamma0: f64,
    n_ref: usize,
    seed: u64,
) -> Result<f64> {
    if n_ref < 100 {
        return Err(Error::InvalidInput(format!("n_ref = {n_ref} must be >= 100")));
    }
    let values = reference_test_values(m, d, gamma0, n_ref, seed)?;
    quantile(&values, 1.0 - gamma0)
}

/// Percentile-based preferable-set test against a precomputed threshold.
pub fn is_preferable_percentile(q: &SampleSet, gamma0: f64, threshold: f64) -> Result<bool> {
    Ok(score(q, gamma0)? <= threshold)
}

/// Splits sets into `n_groups` groups of increasing test value.
///
/// Returns positions into `sets`. Ties are broken by seed and then by
/// position; the remainder of `len / n_groups` goes to the first groups.
pub fn rank_into_groups(sets: &[SampleSet], gamma0: f64, n_groups: usize) -> Result<Vec<Vec<usize>>> {
    if sets.is_empty() {
        return Err(Error::InvalidInput("no sample sets to rank".into()));
    }
    if n_groups < 2 {
        return Err(Error::InvalidInput(format!("n_groups = {n_groups} must be >= 2")));
    }
    let scores = sets
        .iter()
        .map(|q| score(q, gamma0))
        .collect::<Result<Vec<f64>>>()?;
    let keys: Vec<(f64, u64)> = scores.into_iter().zip(sets.iter().map(SampleSet::seed)).collect();
    Ok(group_by_rank(&keys, n_groups))
}

/// Grouping on `(score, seed)` keys; see [`rank_into_groups`].
pub fn group_by_rank(keys: &[(f64, u64)], n_groups: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| {
        keys[a]
            .0
            .total_cmp(&keys[b].0)
            .then(keys[a].1.cmp(&keys[b].1))
            .then(a.cmp(&b))
    });
    let base = keys.len() / n_groups;
    let extra = keys.len() % n_groups;
    let mut groups = Vec::with_capacity(n_groups);
    let mut start = 0;
    for g in 0..n_groups {
        let size = base + usize::from(g < extra);
        groups.push(order[start..start + size].to_vec());
        start += size;
    }
    groups
}

const CSV_HEADER: &str = "# m,d,distribution,seed,gamma0,test_value";

/// Writes a set as CSV: the metadata header line, a metadata value line,
/// then one row of `d` coordinates per point.
pub fn write_sample_set_csv(q: &SampleSet, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let (g, t) = match q.cached {
        Some((g, t)) => (g.to_string(), t.to_string()),
        None => (String::new(), String::new()),
    };
    let mut out = format!(
        "{CSV_HEADER}\n# {},{},{},{},{g},{t}\n",
        q.m, q.dim, q.distribution, q.seed
    );
    for p in q.points() {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    w.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a set written by [`write_sample_set_csv`].
pub fn read_sample_set_csv(path: &Path) -> Result<SampleSet> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let mut next_line = || -> Result<Option<String>> {
        lines.next().transpose().map_err(|e| Error::io(path, e))
    };
    let bad = |msg: &str| Error::InvalidInput(format!("{}: {msg}", path.display()));
    let header = next_line()?.ok_or_else(|| bad("empty file"))?;
    if header.trim() != CSV_HEADER {
        return Err(bad("missing sample-set header"));
    }
    let meta = next_line()?.ok_or_else(|| bad("missing metadata line"))?;
    let fields: Vec<&str> = meta
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| bad("metadata line must start with '#'"))?
        .split(',')
        .map(str::trim)
        .collect();
    if fields.len() != 6 {
        return Err(bad("metadata line needs 6 fields"));
    }
    let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| bad("bad integer"));
    let m = parse_usize(fields[0])?;
    let d = parse_usize(fields[1])?;
    let distribution: Distribution = fields[2].parse()?;
    let seed = fields[3].parse::<u64>().map_err(|_| bad("bad seed"))?;
    let cached = if fields[4].is_empty() || fields[5].is_empty() {
        None
    } else {
        let g = fields[4].parse::<f64>().map_err(|_| bad("bad gamma0"))?;
        let t = fields[5].parse::<f64>().map_err(|_| bad("bad test value"))?;
        Some((g, t))
    };
    let mut coords = Vec::with_capacity(m * d);
    while let Some(line) = next_line()? {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("bad coordinate")))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
        coords.extend(row);
    }
    if coords.len() != m * d {
        return Err(bad(&format!("expected {m} points, found {}", coords.len() / d.max(1))));
    }
    let mut q = SampleSet::from_coords(coords, d, distribution, seed)?;
    q.cached = cached;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn draws_are_reproducible() {
        let a = draw_uniform(3, 1, 7).unwrap();
        let b = draw_uniform(3, 1, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, draw_uniform(3, 1, 8).unwrap());
        let c = draw_chebyshev(5, 2, 7).unwrap();
        assert_eq!(c, draw_chebyshev(5, 2, 7).unwrap());
        assert_eq!(c.m(), 5);
        assert_eq!(c.point(4).len(), 2);
        assert!(draw_uniform(0, 1, 1).is_err());
    }

    #[test]
    fn uniform_moments() {
        let q = draw_uniform(100_000, 1, 11).unwrap();
        let mean = q.coords().iter().sum::<f64>() / 1e5;
        // sd of the mean is sqrt(1/3)/sqrt(1e5) ~ 0.0018; 0.01 is > 4 sd
        assert!(mean.abs() < 0.01, "mean {mean}");
        let q = draw_uniform(100_000, 2, 12).unwrap();
        let frac = q.points().filter(|p| p[0] > 0.0).count() as f64 / 1e5;
        assert!((frac - 0.5).abs() < 0.006, "fraction {frac}");
    }

    #[test]
    fn chebyshev_moments() {
        let q = draw_chebyshev(100_000, 1, 13).unwrap();
        let inner = q.coords().iter().filter(|y| y.abs() <= 0.5).count() as f64 / 1e5;
        // (2/pi) asin(1/2) = 1/3
        assert!((inner - 1.0 / 3.0).abs() < 0.01, "fraction {inner}");
        let mean = q.coords().iter().sum::<f64>() / 1e5;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!(q.coords().iter().all(|y| y.abs() < 1.0));
    }

    #[test]
    fn test_value_at_center() {
        let mut q = SampleSet::from_coords(vec![0.0; 4], 1, Distribution::Uniform, 0).unwrap();
        let stat = test_value(&mut q, 0.5).unwrap();
        // 4 (2/sqrt(pi)) exp(-(pi/8) sqrt(8)), 30-digit reference
        assert_relative_eq!(stat.value, 1.486398179366398, max_relative = 1e-14);
        assert_eq!(stat.per_sample.len(), 4);
        assert_eq!(q.cached_test_value(0.5), Some(stat.value));
        assert_eq!(q.cached_test_value(0.4), None);
    }

    #[test]
    fn weight_grows_toward_boundary() {
        let y = 1.0 - 1e-16;
        assert_eq!(y, 1.0 - 2f64.powi(-53));
        let near = sample_weight(&[y], 1, 0.5);
        // 1 - y^2 = 2^-53 (2 - 2^-53), so Omega ~ 9.2e3 and the exponent ~ 1e-8
        let omega = 2.0 / PI.sqrt() * (2f64.powi(-53) * (2.0 - 2f64.powi(-53))).powf(-0.25);
        assert!(omega > 9.0e3);
        assert_relative_eq!(near, omega, max_relative = 1e-7);
        assert_eq!(sample_weight(&[1.0], 10, 0.5), f64::INFINITY);
        assert_eq!(sample_weight(&[-1.0, 0.2], 10, 0.5), f64::INFINITY);

        let q = SampleSet::from_coords(vec![1.0 - 1e-16; 10], 1, Distribution::Uniform, 0).unwrap();
        assert!(!is_preferable_1d(&q, 0.5).unwrap());
    }

    #[test]
    fn moving_a_point_inward_lowers_the_score() {
        let mut pts = vec![0.1, -0.3, 0.6, 0.999];
        let before = compute_test_value(&SampleSet::from_coords(pts.clone(), 1, Distribution::Uniform, 0).unwrap(), 0.8)
            .unwrap()
            .value;
        pts[3] = 0.5;
        let after = compute_test_value(&SampleSet::from_coords(pts, 1, Distribution::Uniform, 0).unwrap(), 0.8)
            .unwrap()
            .value;
        assert!(after < before);
    }

    #[test]
    fn threshold_values() {
        assert_relative_eq!(preferable_threshold_1d(100, 0.8).unwrap(), 27.76068384928934, max_relative = 1e-13);
        let g = 0.37;
        assert_relative_eq!(
            preferable_threshold_1d(16, g).unwrap() / preferable_threshold_1d(1, g).unwrap(),
            2.0,
            max_relative = 1e-15
        );
        let limit = 32.0 * 2f64.sqrt() / (PI * PI.sqrt()) + 4.0 * 2f64.sqrt() / PI;
        assert_relative_eq!(limit, 9.927818031897056, max_relative = 1e-14);
        assert_relative_eq!(preferable_threshold_1d(1, 1.0 - 1e-12).unwrap(), limit, max_relative = 1e-11);
        assert!(preferable_threshold_1d(10, 1.0).is_err());
    }

    #[test]
    fn centered_set_is_preferable() {
        let q = SampleSet::from_coords(vec![0.0; 100], 1, Distribution::Uniform, 0).unwrap();
        assert!(is_preferable_1d(&q, 0.8).unwrap());
        let q2 = draw_uniform(10, 2, 0).unwrap();
        assert!(is_preferable_1d(&q2, 0.8).is_err());
    }

    #[test]
    fn quantile_interpolation() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 1.0).unwrap(), 4.0);
        assert_eq!(quantile(&v, 0.0).unwrap(), 1.0);
        assert_relative_eq!(quantile(&v, 0.5).unwrap(), 2.5);
        assert!(quantile(&[], 0.5).is_err());
    }

    #[test]
    fn percentile_threshold_is_reproducible_and_near_max_for_tiny_gamma() {
        let t1 = estimate_percentile_threshold(20, 2, 0.5, 200, 5).unwrap();
        assert_eq!(t1, estimate_percentile_threshold(20, 2, 0.5, 200, 5).unwrap());
        let refs = reference_test_values(20, 2, 1e-9, 200, 5).unwrap();
        let max = refs.iter().cloned().fold(f64::MIN, f64::max);
        let t0 = estimate_percentile_threshold(20, 2, 1e-9, 200, 5).unwrap();
        assert_relative_eq!(t0, max, max_relative = 1e-6);
        assert!(estimate_percentile_threshold(20, 2, 0.5, 99, 5).is_err());
    }

    #[test]
    fn grouping_sizes_and_ties() {
        let sets: Vec<SampleSet> = (0..7).map(|s| draw_uniform(5, 1, s).unwrap()).collect();
        let groups = rank_into_groups(&sets, 0.8, 5).unwrap();
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 2, 1, 1, 1]);
        let flat: Vec<f64> = groups
            .iter()
            .flatten()
            .map(|&i| compute_test_value(&sets[i], 0.8).unwrap().value)
            .collect();
        assert!(flat.windows(2).all(|w| w[0] <= w[1]));

        let keys = vec![(1.0, 9), (1.0, 3), (1.0, 3), (1.0, 1)];
        assert_eq!(group_by_rank(&keys, 2), vec![vec![3, 1], vec![2, 0]]);
        assert_eq!(group_by_rank(&keys, 2), group_by_rank(&keys, 2));
        assert!(rank_into_groups(&[], 0.8, 5).is_err());
        assert!(rank_into_groups(&sets, 0.8, 1).is_err());
    }

    #[test]
    fn thousand_sets_make_equal_quintiles() {
        let keys: Vec<(f64, u64)> = (0..1000u64).map(|i| ((i * 7919 % 1000) as f64, i)).collect();
        assert!(group_by_rank(&keys, 5).iter().all(|g| g.len() == 200));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        let mut q = draw_chebyshev(9, 2, 77).unwrap();
        test_value(&mut q, 0.8).unwrap();
        write_sample_set_csv(&q, &path).unwrap();
        let back = read_sample_set_csv(&path).unwrap();
        assert_eq!(back, q);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# m,d,distribution,seed,gamma0,test_value\n# 9,2,chebyshev,77,0.8,"));
    }
}
