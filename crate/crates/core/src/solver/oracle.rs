use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measurement::SparseSignal;

pub const ORACLE_MAX_N: usize = 20;
pub const ORACLE_MAX_S: usize = 4;

/// Sparsest exact fit by enumerating every support of size `<= s_max`.
///
/// A support fits when its least-squares residual is at most
/// `tol (1 + ||g||)`; among fits of equal size the smallest residual wins.
/// Returns `None` when nothing fits.
pub fn l0_oracle(a: &DMatrix<f64>, g: &DVector<f64>, s_max: usize, tol: f64) -> Result<Option<SparseSignal>> {
    let n = a.ncols();
    if n > ORACLE_MAX_N || s_max > ORACLE_MAX_S {
        return Err(Error::Budget(format!(
            "oracle limited to N <= {ORACLE_MAX_N}, s_max <= {ORACLE_MAX_S} (got N={n}, s_max={s_max})"
        )));
    }
    if g.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: g.len(),
        });
    }
    let limit = tol * (1.0 + g.norm());
    if g.norm() <= limit {
        return SparseSignal::new(n, vec![], 0).map(Some);
    }
    for s in 1..=s_max.min(a.nrows()) {
        let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
        for support in (0..n).combinations(s) {
            let Some((coef, res)) = least_squares(a, g, &support) else {
                continue;
            };
            if res <= limit && best.as_ref().is_none_or(|b| res < b.0) {
                best = Some((res, support, coef));
            }
        }
        if let Some((_, support, coef)) = best {
            let entries = support.into_iter().zip(coef.iter().copied()).filter(|e| e.1 != 0.0).collect();
            return SparseSignal::new(n, entries, 0).map(Some);
        }
    }
    Ok(None)
}

fn least_squares(a: &DMatrix<f64>, g: &DVector<f64>, support: &[usize]) -> Option<(DVector<f64>, f64)> {
    let a_s = a.select_columns(support);
    let svd = a_s.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if !(svd.singular_values.min() > 1e-12 * smax) {
        return None;
    }
    let coef = svd.solve(g, 0.0).ok()?;
    let res = (&a_s * &coef - g).norm();
    Some((coef, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn matrix() -> DMatrix<f64> {
        DMatrix::from_fn(4, 6, |i, j| ((i * 7 + j * 3) as f64 * 0.71).sin() + if i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn one_sparse() {
        let a = matrix();
        let g = a.column(3) * 2.5;
        let c = l0_oracle(&a, &g, 1, 1e-10).unwrap().unwrap();
        assert_eq!(c.support(), &[3]);
        assert_relative_eq!(c.values()[0], 2.5, epsilon = 1e-10);
    }

    #[test]
    fn zero_data() {
        let c = l0_oracle(&matrix(), &DVector::zeros(4), 2, 1e-10).unwrap().unwrap();
        assert_eq!(c.sparsity(), 0);
    }

    #[test]
    fn guards_and_misses() {
        let a = DMatrix::zeros(3, 21);
        assert!(l0_oracle(&a, &DVector::zeros(3), 1, 1e-9).is_err());
        assert!(l0_oracle(&matrix(), &DVector::zeros(4), 5, 1e-9).is_err());
        let g = matrix() * DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(l0_oracle(&matrix(), &g, 2, 1e-10).unwrap().is_none());
    }
}
