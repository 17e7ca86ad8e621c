use std::collections::HashSet;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};

/// Supports enumerated exactly by [`empirical_re_constant`].
const RE_EXHAUSTIVE_LIMIT: f64 = 5000.0;
/// Supports allowed in exhaustive [`sparse_min_eig`].
const EIG_EXHAUSTIVE_LIMIT: f64 = 1e5;

/// A member of the cone `C(s; alpha) = {z : ||z_{S^c}||_1 <= alpha sqrt(s) ||z_S||_2}`
/// together with a support `S` that certifies it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeVector {
    pub vector: Vec<f64>,
    /// Sorted, of size `s`.
    pub witness: Vec<usize>,
}

/// Indices of the `s` largest magnitudes, ties broken by lowest index.
fn top_support(z: &[f64], s: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&i, &j| z[j].abs().total_cmp(&z[i].abs()).then(i.cmp(&j)));
    order.truncate(s);
    order.sort_unstable();
    order
}

fn cone_inequality(z: &[f64], support: &[usize], s: usize, alpha: f64) -> bool {
    let mut head2 = 0.0;
    let mut total1 = 0.0;
    let mut head1 = 0.0;
    for &i in support {
        head2 += z[i] * z[i];
        head1 += z[i].abs();
    }
    for v in z {
        total1 += v.abs();
    }
    let tail1 = (total1 - head1).max(0.0);
    tail1 <= alpha * (s as f64).sqrt() * head2.sqrt()
}

/// Cone membership of `z`. The top-`s` support simultaneously minimizes the
/// tail l1 norm and maximizes the head l2 norm, so testing it decides
/// membership for all supports.
pub fn cone_member(z: &[f64], s: usize, alpha: f64) -> Result<Option<ConeVector>> {
    if s > z.len() {
        return Err(Error::InvalidInput(format!("s = {s} exceeds N = {}", z.len())));
    }
    let witness = top_support(z, s);
    Ok(cone_inequality(z, &witness, s, alpha).then(|| ConeVector {
        vector: z.to_vec(),
        witness,
    }))
}

/// A random unit vector of `C(s; alpha)`: Gaussian head on a random support,
/// Gaussian tail direction rescaled to l1 norm `u alpha sqrt(s) ||head||_2`
/// with `u` uniform on `[0, 1]`.
pub fn sample_cone(n: usize, s: usize, alpha: f64, seed: u64) -> Result<ConeVector> {
    let u = stream(derive_seed(seed, &[1])).random::<f64>();
    sample_cone_with(n, s, alpha, u, seed)
}

fn sample_cone_with(n: usize, s: usize, alpha: f64, u: f64, seed: u64) -> Result<ConeVector> {
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!("need 1 <= s <= N, got s = {s}, N = {n}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    let mut rng = stream(seed);
    let mut witness = sample_indices(&mut rng, n, s).into_vec();
    witness.sort_unstable();
    let mut z = vec![0.0; n];
    let mut head2: f64 = 0.0;
    while head2 == 0.0 {
        head2 = 0.0;
        for &i in &witness {
            z[i] = StandardNormal.sample(&mut rng);
            head2 += z[i] * z[i];
        }
    }
    let mut in_head = vec![false; n];
    for &i in &witness {
        in_head[i] = true;
    }
    let tail: Vec<usize> = (0..n).filter(|&i| !in_head[i]).collect();
    let target = u * alpha * (s as f64).sqrt() * head2.sqrt();
    if target > 0.0 && !tail.is_empty() {
        let dir: Vec<f64> = tail.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
        let l1: f64 = dir.iter().map(|v: &f64| v.abs()).sum();
        if l1 > 0.0 {
            // Shrink by a few ulps so rounding cannot break the certificate.
            let scale = target / l1 * (1.0 - 1e-12);
            for (&i, v) in tail.iter().zip(&dir) {
                z[i] = v * scale;
            }
        }
    }
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut z {
        *v /= norm;
    }
    Ok(ConeVector { vector: z, witness })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// Smallest `||A z||_2^2` over sampled unit cone vectors, joined with the
/// exact sparse minimum over every size-`s` support when there are at most
/// 5000 of them.
///
/// This probes the cone and is only an upper bound on the true infimum.
pub fn empirical_re_constant(a: &DMatrix<f64>, s: usize, alpha: f64, n_probes: usize, seed: u64) -> Result<f64> {
    if n_probes == 0 {
        return Err(Error::InvalidInput("n_probes must be >= 1".into()));
    }
    let n = a.ncols();
    let probed = (0..n_probes as u64)
        .into_par_iter()
        .map(|i| {
            let z = sample_cone(n, s, alpha, derive_seed(seed, &[i]))?;
            Ok((a * DVector::from_vec(z.vector)).norm_squared())
        })
        .try_reduce(|| f64::INFINITY, |x, y| Ok(x.min(y)))?;
    if binomial(n, s) <= RE_EXHAUSTIVE_LIMIT {
        return Ok(probed.min(sparse_min_eig(a, s, SparseMode::Exhaustive)?));
    }
    Ok(probed)
}

/// Which supports [`sparse_min_eig`] visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparseMode {
    /// Every size-`s` support (at most `10^5`).
    Exhaustive,
    /// `count` distinct random supports, or all of them when `count` reaches
    /// their number.
    Random { count: usize, seed: u64 },
}

/// Minimum over size-`s` supports `S` of `lambda_min(A_Sᵀ A_S)`.
pub fn sparse_min_eig(a: &DMatrix<f64>, s: usize, mode: SparseMode) -> Result<f64> {
    let n = a.ncols();
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!("need 1 <= s <= N, got s = {s}, N = {n}")));
    }
    let total = binomial(n, s);
    let supports: Vec<Vec<usize>> = match mode {
        SparseMode::Exhaustive if total > EIG_EXHAUSTIVE_LIMIT => {
            return Err(Error::Budget(format!(
                "C({n},{s}) = {total:e} supports exceed the exhaustive limit {EIG_EXHAUSTIVE_LIMIT:e}"
            )));
        }
        SparseMode::Random { count: 0, .. } => {
            return Err(Error::InvalidInput("random mode needs count >= 1".into()));
        }
        SparseMode::Random { count, seed } if (count as f64) < total => {
            let mut rng = stream(seed);
            let mut seen = HashSet::with_capacity(count);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let mut sup = sample_indices(&mut rng, n, s).into_vec();
                sup.sort_unstable();
                if seen.insert(sup.clone()) {
                    out.push(sup);
                }
            }
            out
        }
        _ => (0..n).combinations(s).collect(),
    };
    let gram = a.tr_mul(a);
    let min = supports
        .par_iter()
        .map(|sup| {
            let block = DMatrix::from_fn(s, s, |i, j| gram[(sup[i], sup[j])]);
            SymmetricEigen::new(block).eigenvalues.min()
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sparse_vectors_are_members() {
        let z = [0.0, 3.0, 0.0, -1.0, 0.0];
        let c = cone_member(&z, 2, 1.01).unwrap().unwrap();
        assert_eq!(c.witness, vec![1, 3]);
    }

    #[test]
    fn all_ones_is_not_a_member() {
        assert!(cone_member(&[1.0; 4], 1, 1.5).unwrap().is_none());
        assert!(cone_member(&[1.0; 4], 5, 1.5).is_err());
    }

    #[test]
    fn ties_take_lowest_index() {
        assert_eq!(top_support(&[1.0, -2.0, 2.0, 1.0], 2), vec![1, 2]);
        assert_eq!(top_support(&[1.0, 1.0, 1.0], 2), vec![0, 1]);
    }

    #[test]
    fn zero_u_gives_sparse_unit_vector() {
        let c = sample_cone_with(30, 4, 2.0, 0.0, 9).unwrap();
        let nnz = c.vector.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nnz, 4);
        let norm: f64 = c.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn full_tail_is_still_certified() {
        let c = sample_cone_with(50, 3, 2.0, 1.0, 4).unwrap();
        assert!(cone_inequality(&c.vector, &c.witness, 3, 2.0));
        assert!(cone_member(&c.vector, 3, 2.0).unwrap().is_some());
    }

    #[test]
    fn re_constant_extremes() {
        let eye = DMatrix::identity(6, 6);
        assert_relative_eq!(empirical_re_constant(&eye, 2, 2.0, 50, 1).unwrap(), 1.0, epsilon = 1e-12);
        let zero = DMatrix::zeros(4, 6);
        assert_eq!(empirical_re_constant(&zero, 2, 2.0, 50, 1).unwrap(), 0.0);
    }

    #[test]
    fn sparse_eig_orthogonal_and_duplicate() {
        let q = DMatrix::from_fn(5, 5, |i, j| ((i * 5 + j) as f64).sin()).qr().q();
        for s in 1..=5 {
            assert_relative_eq!(sparse_min_eig(&q, s, SparseMode::Exhaustive).unwrap(), 1.0, epsilon = 1e-12);
        }
        let mut dup = q.clone();
        let col = dup.column(0).into_owned();
        dup.set_column(3, &col);
        assert!(sparse_min_eig(&dup, 2, SparseMode::Exhaustive).unwrap().abs() < 1e-12);
    }

    #[test]
    fn budget_guard() {
        let a = DMatrix::<f64>::zeros(2, 60);
        assert!(matches!(sparse_min_eig(&a, 5, SparseMode::Exhaustive), Err(Error::Budget(_))));
        assert!(sparse_min_eig(&a, 5, SparseMode::Random { count: 10, seed: 1 }).is_ok());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(40, 2), 780.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
