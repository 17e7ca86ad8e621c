//! Orthonormal Legendre polynomials, the pointwise envelope and index sets.
//!
//! Polynomials are normalized against the uniform probability measure
//! `dy/2` on `[-1, 1]`, so `L_j(1) = sqrt(2j + 1)`. Values come from the
//! orthonormal three-term recurrence
//!
//! ```text
//! L_j(y) = a_j y L_{j-1}(y) - b_j L_{j-2}(y)
//! a_j = sqrt((2j+1)(2j-1)) / j,   b_j = (j-1)/j * sqrt((2j+1)/(2j-3))
//! ```
//!
//! which keeps every intermediate of size `O(sqrt(2j+1))`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Default tolerance for points slightly outside `[-1, 1]`.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Default cap on the size of generated index sets.
pub const MAX_INDEX_SET: usize = 1_000_000;

/// Per-coordinate envelope constant `2 / sqrt(pi)`.
pub fn envelope_constant() -> f64 {
    2.0 / PI.sqrt()
}

/// Multi-index of polynomial degrees, one per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("multi-index needs d >= 1".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn univariate(j: usize) -> Self {
        MultiIndex(vec![j])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, ")")
    }
}

/// Ordered, duplicate-free set of multi-indices of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    dim: usize,
    indices: Vec<MultiIndex>,
    label: String,
}

impl IndexSet {
    /// Builds a set from an explicit list, keeping its order.
    pub fn from_indices(indices: Vec<MultiIndex>, label: impl Into<String>) -> Result<Self> {
        let first = indices
            .first()
            .ok_or_else(|| Error::InvalidInput("index set must be nonempty".into()))?;
        let dim = first.dim();
        let mut seen = std::collections::HashSet::with_capacity(indices.len());
        for j in &indices {
            if j.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: j.dim(),
                });
            }
            if !seen.insert(j) {
                return Err(Error::InvalidInput(format!("duplicate index {j}")));
            }
        }
        Ok(IndexSet {
            dim,
            indices,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis functions `N`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Largest degree used in coordinate `k`.
    pub fn max_degree(&self, k: usize) -> usize {
        self.indices.iter().map(|j| j.0[k]).max().unwrap_or(0)
    }

    /// `max_j ||L_j||_inf = max_j prod_k sqrt(2 j_k + 1)`.
    pub fn uniform_bound(&self) -> f64 {
        self.indices
            .iter()
            .map(|j| j.0.iter().map(|&jk| ((2 * jk + 1) as f64).sqrt()).product::<f64>())
            .fold(0.0, f64::max)
    }
}

/// A point of `[-1, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point needs d >= 1".into()));
        }
        for (k, &y) in coords.iter().enumerate() {
            if !y.is_finite() || y.abs() > 1.0 {
                return Err(Error::Domain(format!("coordinate {k} = {y} is outside [-1, 1]")));
            }
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

fn checked_coord(y: f64, tol: f64) -> Result<f64> {
    if !y.is_finite() || y.abs() > 1.0 + tol {
        return Err(Error::Domain(format!("y = {y} is outside [-1, 1]")));
    }
    Ok(y.clamp(-1.0, 1.0))
}

/// `L_j(y)` with the default domain tolerance.
pub fn eval_legendre_1d(j: usize, y: f64) -> Result<f64> {
    eval_legendre_1d_tol(j, y, DOMAIN_TOL)
}

/// `L_j(y)`; points within `tol` of the interval are clamped onto it.
pub fn eval_legendre_1d_tol(j: usize, y: f64, tol: f64) -> Result<f64> {
    let y = checked_coord(y, tol)?;
    Ok(legendre_recurrence(j, y))
}

#[inline]
fn recurrence_coeffs(j: usize) -> (f64, f64) {
    let jf = j as f64;
    let a = ((2.0 * jf + 1.0) * (2.0 * jf - 1.0)).sqrt() / jf;
    let b = (jf - 1.0) / jf * ((2.0 * jf + 1.0) / (2.0 * jf - 3.0)).sqrt();
    (a, b)
}

fn legendre_recurrence(j: usize, y: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 3f64.sqrt() * y;
    for k in 2..=j {
        let (a, b) = recurrence_coeffs(k);
        let next = a * y * cur - b * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = L_k(y)` for `k = 0..out.len()`. `y` must lie in `[-1, 1]`.
pub fn legendre_table(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 3f64.sqrt() * y;
    for k in 2..out.len() {
        let (a, b) = recurrence_coeffs(k);
        out[k] = a * y * out[k - 1] - b * out[k - 2];
    }
}

/// Tensor-product polynomial `prod_k L_{j_k}(y_k)`.
pub fn eval_legendre_multi(j: &MultiIndex, y: &Point) -> Result<f64> {
    if j.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: y.dim(),
        });
    }
    let mut v = 1.0;
    for (&jk, &yk) in j.0.iter().zip(&y.0) {
        v *= eval_legendre_1d(jk, yk)?;
    }
    Ok(v)
}

/// Envelope `Omega(y) = prod_k (2/sqrt(pi)) (1 - y_k^2)^(-1/4)`.
///
/// Bounds `|L_j(y)|` for every multi-index at once. Diverges on the
/// boundary, which is reported as [`Error::Singular`].
pub fn envelope(y: &Point) -> Result<f64> {
    envelope_coords(y.coords())
}

pub(crate) fn envelope_coords(y: &[f64]) -> Result<f64> {
    let c = envelope_constant();
    let mut v = 1.0;
    for (k, &yk) in y.iter().enumerate() {
        let w = (1.0 - yk) * (1.0 + yk);
        if w <= 0.0 {
            return Err(Error::Singular { coord: k });
        }
        v *= c / w.sqrt().sqrt();
    }
    Ok(v)
}

/// `psi(y, z) = sum_j z_j L_j(y)` over the index set.
pub fn eval_expansion(z: &[f64], set: &IndexSet, y: &Point) -> Result<f64> {
    if z.len() != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            found: z.len(),
        });
    }
    if y.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: y.dim(),
        });
    }
    let tables = coordinate_tables(set, y.coords(), DOMAIN_TOL)?;
    Ok(set
        .indices
        .iter()
        .zip(z)
        .map(|(j, &zj)| zj * tensor_value(&tables, j))
        .sum())
}

/// One recurrence sweep per coordinate, up to the largest degree used there.
pub(crate) fn coordinate_tables(set: &IndexSet, y: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    (0..set.dim())
        .map(|k| {
            let yk = checked_coord(y[k], tol)?;
            let mut t = vec![0.0; set.max_degree(k) + 1];
            legendre_table(yk, &mut t);
            Ok(t)
        })
        .collect()
}

#[inline]
pub(crate) fn tensor_value(tables: &[Vec<f64>], j: &MultiIndex) -> f64 {
    j.0.iter()
        .zip(tables)
        .map(|(&jk, t)| t[jk])
        .product()
}

/// Contiguous univariate degree window `{a, ..., b}`.
pub fn make_window_set(a: usize, b: usize) -> Result<IndexSet> {
    if b < a {
        return Err(Error::InvalidInput(format!("empty window [{a}, {b}]")));
    }
    Ok(IndexSet {
        dim: 1,
        indices: (a..=b).map(MultiIndex::univariate).collect(),
        label: format!("window_{a}_{b}"),
    })
}

/// Total-degree set `{j : sum_k j_k <= w}` in lexicographic order.
pub fn make_total_degree_set(d: usize, w: usize) -> Result<IndexSet> {
    make_total_degree_set_capped(d, w, MAX_INDEX_SET)
}

pub fn make_total_degree_set_capped(d: usize, w: usize, cap: usize) -> Result<IndexSet> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    // binomial(w + d, d), computed incrementally with overflow checks
    let mut count: u128 = 1;
    for i in 1..=d as u128 {
        count = count * (w as u128 + i) / i;
        if count > cap as u128 {
            return Err(Error::Budget(format!(
                "total-degree set (d={d}, w={w}) exceeds cap {cap}"
            )));
        }
    }
    let mut indices = Vec::with_capacity(count as usize);
    let mut cur = vec![0usize; d];
    push_total_degree(&mut cur, 0, w, &mut indices);
    Ok(IndexSet {
        dim: d,
        indices,
        label: format!("total_degree_d{d}_w{w}"),
    })
}

fn push_total_degree(cur: &mut Vec<usize>, k: usize, budget: usize, out: &mut Vec<MultiIndex>) {
    if k == cur.len() {
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for j in 0..=budget {
        cur[k] = j;
        push_total_degree(cur, k + 1, budget - j, out);
    }
    cur[k] = 0;
}
