#![allow(dead_code)]

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use legendre_cs::measurement::SparseSignal;
use legendre_cs::rng::{derive_seed, stream};
use legendre_cs::theory::{sparse_min_eig, SparseMode};

/// Gaussian matrix with unit-norm columns.
pub fn unit_gaussian(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream(seed);
    let mut a = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
    for mut c in a.column_iter_mut() {
        let norm = c.norm();
        c /= norm;
    }
    a
}

/// Tiny instance `i`: 8 x 12 unit-column Gaussian matrix and a 1- or
/// 2-sparse standard normal signal.
pub fn tiny_instance(i: u64) -> (DMatrix<f64>, SparseSignal) {
    let seed = derive_seed(0x7e57, &[i]);
    let a = unit_gaussian(8, 12, derive_seed(seed, &[0]));
    let mut rng = stream(derive_seed(seed, &[1]));
    let s = rng.random_range(1..=2);
    let c = legendre_cs::measurement::gen_sparse_signal(12, s, derive_seed(seed, &[2])).unwrap();
    (a, c)
}

/// Smallest singular value over all two-column submatrices.
pub fn pair_margin(a: &DMatrix<f64>) -> f64 {
    sparse_min_eig(a, 2, SparseMode::Exhaustive).unwrap().max(0.0).sqrt()
}

/// Exact basis pursuit optimum by enumerating basic solutions: every
/// support of `m` columns with a nonsingular square system. Returns the
/// optimal l1 value and the minimizing vertices (within `1e-9` relative).
pub fn vertex_optimum(a: &DMatrix<f64>, g: &DVector<f64>) -> (f64, Vec<DVector<f64>>) {
    let (m, n) = a.shape();
    let mut vertices: Vec<(f64, DVector<f64>)> = Vec::new();
    for support in (0..n).combinations(m) {
        let a_s = a.select_columns(&support);
        let Some(z) = a_s.clone().lu().solve(g) else { continue };
        if (&a_s * &z - g).norm() > 1e-9 * (1.0 + g.norm()) {
            continue;
        }
        let mut full = DVector::zeros(n);
        for (k, &j) in support.iter().enumerate() {
            full[j] = z[k];
        }
        vertices.push((full.lp_norm(1), full));
    }
    let best = vertices.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let optimal = vertices
        .into_iter()
        .filter(|v| v.0 <= best * (1.0 + 1e-9))
        .map(|v| v.1)
        .collect();
    (best, optimal)
}
