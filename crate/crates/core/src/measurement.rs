//! Sampling matrices, sparse ground-truth signals and observations.

use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as sample_indices;
use rand_distr::{Distribution as _, StandardNormal};

use crate::basis::{coordinate_tables, tensor_value, IndexSet, DOMAIN_TOL};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::sampling::{Distribution, SampleSet};

/// Where a matrix came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub index_set: String,
    pub sample_seed: u64,
    pub distribution: Distribution,
}

/// Normalized `m x N` sampling matrix `A_ij = w(y_i) L_j(y_i) / sqrt(m)`,
/// with `w = 1` unless preconditioned.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    matrix: DMatrix<f64>,
    preconditioned: bool,
    provenance: Provenance,
}

impl SensingMatrix {
    /// Wraps an arbitrary matrix, e.g. for solver tests.
    pub fn from_matrix(matrix: DMatrix<f64>, provenance: Provenance) -> Result<Self> {
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(SensingMatrix {
            matrix,
            preconditioned: false,
            provenance,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn preconditioned(&self) -> bool {
        self.preconditioned
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

fn check_dims(set: &IndexSet, q: &SampleSet) -> Result<()> {
    if set.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: q.dim(),
        });
    }
    Ok(())
}

fn fill(set: &IndexSet, q: &SampleSet, weight: impl Fn(&[f64]) -> f64) -> Result<DMatrix<f64>> {
    let m = q.m();
    let scale = 1.0 / (m as f64).sqrt();
    let mut a = DMatrix::zeros(m, set.len());
    for (i, y) in q.points().enumerate() {
        let tables = coordinate_tables(set, y, DOMAIN_TOL)?;
        let w = weight(y) * scale;
        for (j, idx) in set.indices().iter().enumerate() {
            a[(i, j)] = w * tensor_value(&tables, idx);
        }
    }
    Ok(a)
}

fn provenance(set: &IndexSet, q: &SampleSet) -> Provenance {
    Provenance {
        index_set: set.label().to_string(),
        sample_seed: q.seed(),
        distribution: q.distribution(),
    }
}

/// `A_ij = L_j(y_i) / sqrt(m)`, columns in the order of `set`.
pub fn assemble(set: &IndexSet, q: &SampleSet) -> Result<SensingMatrix> {
    check_dims(set, q)?;
    Ok(SensingMatrix {
        matrix: fill(set, q, |_| 1.0)?,
        preconditioned: false,
        provenance: provenance(set, q),
    })
}

/// Preconditioning weight `(pi/2)^(d/2) prod_k (1 - y_k^2)^(1/4)`.
///
/// With Chebyshev samples, `{w L_j}` is orthonormal and each factor is
/// bounded by `sqrt(2) < sqrt(3)` per coordinate.
pub fn preconditioner_weight(y: &[f64]) -> f64 {
    y.iter()
        .map(|&t| (PI / 2.0).sqrt() * ((1.0 - t) * (1.0 + t)).max(0.0).sqrt().sqrt())
        .product()
}

/// `A_ij = w(y_i) L_j(y_i) / sqrt(m)` for Chebyshev-distributed samples.
pub fn assemble_preconditioned(set: &IndexSet, q: &SampleSet) -> Result<SensingMatrix> {
    check_dims(set, q)?;
    if q.distribution() != Distribution::Chebyshev {
        return Err(Error::InvalidInput(format!(
            "preconditioned assembly expects Chebyshev samples, got {}",
            q.distribution()
        )));
    }
    Ok(SensingMatrix {
        matrix: fill(set, q, preconditioner_weight)?,
        preconditioned: true,
        provenance: provenance(set, q),
    })
}

/// Sparse coefficient vector stored by support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    len: usize,
    support: Vec<usize>,
    values: Vec<f64>,
    seed: u64,
}

impl SparseSignal {
    /// Builds a signal from a support/value list; entries are sorted by index.
    pub fn new(len: usize, mut entries: Vec<(usize, f64)>, seed: u64) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("repeated support index".into()));
        }
        if let Some(&(j, _)) = entries.iter().find(|e| e.0 >= len) {
            return Err(Error::InvalidInput(format!("support index {j} >= length {len}")));
        }
        if entries.iter().any(|e| e.1 == 0.0 || !e.1.is_finite()) {
            return Err(Error::InvalidInput("support values must be finite and nonzero".into()));
        }
        let (support, values) = entries.into_iter().unzip();
        Ok(SparseSignal {
            len,
            support,
            values,
            seed,
        })
    }

    /// Length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sparsity `s`.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn to_dense(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.len);
        for (&j, &x) in self.support.iter().zip(&self.values) {
            v[j] = x;
        }
        v
    }
}

/// Random `s`-sparse vector: uniformly random support, i.i.d. standard
/// normal values (an exact zero is redrawn).
pub fn gen_sparse_signal(n: usize, s: usize, seed: u64) -> Result<SparseSignal> {
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!("need 1 <= s <= N, got s={s}, N={n}")));
    }
    let mut rng = stream(seed);
    let mut support = sample_indices(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let values = (0..s)
        .map(|_| loop {
            let v: f64 = StandardNormal.sample(&mut rng);
            if v != 0.0 {
                break v;
            }
        })
        .collect();
    Ok(SparseSignal {
        len: n,
        support,
        values,
        seed,
    })
}

/// Observation vector `g` with the noise level used to make it.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub values: DVector<f64>,
    pub noise_level: f64,
}

/// `g = A c + eta u` with `u` uniform on the unit sphere of `R^m`.
pub fn observe(a: &SensingMatrix, c: &SparseSignal, eta: f64, seed: u64) -> Result<Observation> {
    if c.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: c.len(),
        });
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidInput(format!("noise level {eta} must be >= 0")));
    }
    let mut g = DVector::zeros(a.rows());
    for (&j, &x) in c.support().iter().zip(c.values()) {
        g.axpy(x, &a.matrix().column(j), 1.0);
    }
    if eta > 0.0 {
        let mut rng = stream(seed);
        let u = loop {
            let u: DVector<f64> = DVector::from_fn(a.rows(), |_, _| StandardNormal.sample(&mut rng));
            let norm = u.norm();
            if norm > 0.0 {
                break u / norm;
            }
        };
        g.axpy(eta, &u, 1.0);
    }
    Ok(Observation {
        values: g,
        noise_level: eta,
    })
}

const MATRIX_HEADER: &str = "# m,N,preconditioned,index_set,sample_seed,distribution";
const SIGNAL_HEADER: &str = "# N,s,seed";

/// Writes a matrix row-major under a metadata header.
pub fn write_matrix_csv(a: &SensingMatrix, path: &Path) -> Result<()> {
    let p = &a.provenance;
    let mut out = format!(
        "{MATRIX_HEADER}\n# {},{},{},{},{},{}\n",
        a.rows(),
        a.cols(),
        a.preconditioned,
        p.index_set,
        p.sample_seed,
        p.distribution
    );
    for i in 0..a.rows() {
        let row: Vec<String> = a.matrix.row(i).iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_text(path, &out)
}

/// Reads a matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv(path: &Path) -> Result<SensingMatrix> {
    let lines = read_lines(path)?;
    let bad = |msg: &str| Error::InvalidInput(format!("{}: {msg}", path.display()));
    if lines.first().map(|l| l.trim()) != Some(MATRIX_HEADER) {
        return Err(bad("missing matrix header"));
    }
    let meta = metadata_fields(lines.get(1), 6).ok_or_else(|| bad("bad metadata line"))?;
    let m: usize = meta[0].parse().map_err(|_| bad("bad m"))?;
    let n: usize = meta[1].parse().map_err(|_| bad("bad N"))?;
    let preconditioned: bool = meta[2].parse().map_err(|_| bad("bad flag"))?;
    let provenance = Provenance {
        index_set: meta[3].clone(),
        sample_seed: meta[4].parse().map_err(|_| bad("bad seed"))?,
        distribution: meta[5].parse()?,
    };
    let mut data = Vec::with_capacity(m * n);
    for line in lines[2..].iter().filter(|l| !l.trim().is_empty()) {
        let row = parse_row(line).ok_or_else(|| bad("bad entry"))?;
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        data.extend(row);
    }
    if data.len() != m * n {
        return Err(bad("row count does not match header"));
    }
    Ok(SensingMatrix {
        matrix: DMatrix::from_row_slice(m, n, &data),
        preconditioned,
        provenance,
    })
}

/// Writes a signal as `index,value` rows.
pub fn write_signal_csv(c: &SparseSignal, path: &Path) -> Result<()> {
    let mut out = format!("{SIGNAL_HEADER}\n# {},{},{}\n", c.len, c.sparsity(), c.seed);
    for (j, v) in c.support.iter().zip(&c.values) {
        out.push_str(&format!("{j},{v}\n"));
    }
    write_text(path, &out)
}

pub fn read_signal_csv(path: &Path) -> Result<SparseSignal> {
    let lines = read_lines(path)?;
    let bad = |msg: &str| Error::InvalidInput(format!("{}: {msg}", path.display()));
    if lines.first().map(|l| l.trim()) != Some(SIGNAL_HEADER) {
        return Err(bad("missing signal header"));
    }
    let meta = metadata_fields(lines.get(1), 3).ok_or_else(|| bad("bad metadata line"))?;
    let n: usize = meta[0].parse().map_err(|_| bad("bad N"))?;
    let s: usize = meta[1].parse().map_err(|_| bad("bad s"))?;
    let seed: u64 = meta[2].parse().map_err(|_| bad("bad seed"))?;
    let mut entries = Vec::with_capacity(s);
    for line in lines[2..].iter().filter(|l| !l.trim().is_empty()) {
        let (j, v) = line.split_once(',').ok_or_else(|| bad("bad row"))?;
        entries.push((
            j.trim().parse().map_err(|_| bad("bad index"))?,
            v.trim().parse().map_err(|_| bad("bad value"))?,
        ));
    }
    if entries.len() != s {
        return Err(bad("entry count does not match header"));
    }
    SparseSignal::new(n, entries, seed)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(f)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

fn metadata_fields(line: Option<&String>, n: usize) -> Option<Vec<String>> {
    let fields: Vec<String> = line?
        .trim()
        .strip_prefix('#')?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    (fields.len() == n).then_some(fields)
}

fn parse_row(line: &str) -> Option<Vec<f64>> {
    line.split(',').map(|s| s.trim().parse().ok()).collect()
}
