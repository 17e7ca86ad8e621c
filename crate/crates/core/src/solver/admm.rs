//! Splitting iteration for `min ||x||_1` over a closed convex constraint set.
//!
//! The constraint is handled by an exact projection (affine subspace for BP,
//! ellipsoidal ball `||Ax - g|| <= eta` for BPDN) and the l1 term by
//! soft-thresholding; the scaled dual variable `u` carries `Aᵀy / rho`.
//! For BP the iterate is periodically polished: least squares on the
//! current support, accepted once a dual vector certifies optimality.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{operator_norm_estimate, soft, RecoveryResult, SolverConfig, StopReason};
use crate::error::{Error, Result};

const POWER_ITERS: usize = 20;
const POWER_SEED: u64 = 0x1e9e_3779_97f4_a7c1;
/// Over-relaxation factor for the splitting step.
const RELAX: f64 = 1.5;
const STAGNATION_WINDOW: usize = 50;
const BALANCE_RATIO: f64 = 10.0;
const BALANCE_EVERY: usize = 20;
const BALANCE_LIMIT: usize = 40;
const BALANCE_UNTIL: usize = 1000;
/// Relative Tikhonov shift for dual estimates; keeps them bounded when `A`
/// is nearly rank deficient.
const DUAL_SHIFT: f64 = 1e-5;
const CERTIFY_EVERY: usize = 10;
/// Relative pivot size below which row-space directions count as null.
const RANK_TOL: f64 = 1e-11;
/// Magnitude ratio that separates a candidate support from the rest.
const GAP_RATIO: f64 = 5.0;
const CERTIFY_RETRY: usize = 100;

fn check_inputs(a: &DMatrix<f64>, g: &DVector<f64>, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if g.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: g.len(),
        });
    }
    if a.ncols() == 0 || a.nrows() == 0 {
        return Err(Error::InvalidInput("empty sensing matrix".into()));
    }
    if a.iter().chain(g.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite entries in A or g".into()));
    }
    Ok(())
}

/// Row space of `A` with an orthonormal basis `w` (rows), so that
/// `{x : Ax = g} = {x : w x = h}` when consistent.
struct RowSpace {
    w: DMatrix<f64>,
    h: DVector<f64>,
    /// Part of `g` outside the range of `A`.
    outside: f64,
}

impl RowSpace {
    /// Householder QR of `Aᵀ` with column-norm pivoting, `Aᵀ P = Q R`, so
    /// that `A x = g` iff `R11ᵀ (Q1ᵀ x) = (Pᵀ g)_1` on the numerical rank
    /// `r`. Pivots below `RANK_TOL` times the first one end the
    /// factorization; those directions are left unconstrained and only
    /// contribute `O(RANK_TOL ||A|| ||x||)` to the residual.
    fn new(a: &DMatrix<f64>, g: &DVector<f64>) -> RowSpace {
        let (m, n) = (a.nrows(), a.ncols());
        let mut r = a.transpose();
        let mut perm: Vec<usize> = (0..m).collect();
        let mut reflectors: Vec<DVector<f64>> = Vec::new();
        let mut first = 0.0;
        for i in 0..m.min(n) {
            let (piv, norm) = (i..m)
                .map(|j| (j, r.view((i, j), (n - i, 1)).norm()))
                .fold((i, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if i == 0 {
                first = norm;
            }
            if !(norm > RANK_TOL * first) {
                break;
            }
            r.swap_columns(i, piv);
            perm.swap(i, piv);
            // Reflector H = I - 2 v vᵀ mapping the pivot column to -sign(x0) ||x|| e_i.
            let mut v: DVector<f64> = r.view((i, i), (n - i, 1)).column(0).into_owned();
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vn = v.norm();
            if vn > 0.0 {
                v /= vn;
                let mut block = r.view_mut((i, i), (n - i, m - i));
                let proj = block.tr_mul(&v);
                block.ger(-2.0, &v, &proj, 1.0);
            }
            reflectors.push(v);
        }
        let rank = reflectors.len();
        let mut q = DMatrix::zeros(n, rank);
        for k in 0..rank {
            q[(k, k)] = 1.0;
        }
        for (i, v) in reflectors.iter().enumerate().rev() {
            let mut block = q.view_mut((i, 0), (n - i, rank));
            let proj = block.tr_mul(v);
            block.ger(-2.0, v, &proj, 1.0);
        }
        let pg = DVector::from_iterator(m, perm.iter().map(|&j| g[j]));
        let r11 = r.view((0, 0), (rank, rank)).upper_triangle();
        let h = r11
            .tr_solve_upper_triangular(&pg.rows(0, rank).into_owned())
            .unwrap_or_else(|| DVector::zeros(rank));
        let rest = pg.rows(rank, m - rank) - r.view((0, rank), (rank, m - rank)).tr_mul(&h);
        RowSpace {
            w: q.transpose(),
            h,
            outside: rest.norm(),
        }
    }

    fn by_svd(a: &DMatrix<f64>, g: &DVector<f64>) -> RowSpace {
        let svd = a.clone().svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let smax = svd.singular_values.max();
        let cut = smax * f64::EPSILON * a.nrows().max(a.ncols()) as f64;
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| smax > 0.0 && svd.singular_values[i] > cut)
            .collect();
        let r = keep.len();
        let mut w = DMatrix::zeros(r, a.ncols());
        let mut h = DVector::zeros(r);
        let mut in_range = DVector::zeros(a.nrows());
        for (k, &i) in keep.iter().enumerate() {
            let s = svd.singular_values[i];
            let ui = u.column(i);
            let b = ui.dot(g);
            w.row_mut(k).copy_from(&vt.row(i));
            h[k] = b / s;
            in_range.axpy(b, &ui, 1.0);
        }
        let outside = (g - in_range).norm();
        RowSpace { w, h, outside }
    }

    /// `x = v - wᵀ(w v - h)`.
    fn project(&self, v: &DVector<f64>, t: &mut DVector<f64>, x: &mut DVector<f64>) {
        t.gemv(1.0, &self.w, v, 0.0);
        *t -= &self.h;
        x.copy_from(v);
        x.gemv_tr(-1.0, &self.w, t, 1.0);
    }
}

/// `{x : ||A x - g|| <= eta}` in thin-SVD coordinates.
struct Ball {
    vt: DMatrix<f64>,
    sigma: Vec<f64>,
    b: Vec<f64>,
    outside2: f64,
    eta: f64,
    coef: Vec<f64>,
    delta: DVector<f64>,
}

impl Ball {
    fn new(a: &DMatrix<f64>, g: &DVector<f64>, eta: f64) -> Ball {
        let rs = RowSpace::by_svd(a, g);
        // Rows of `rs.w` are right singular vectors; recover sigma and b from them.
        let aw = a * rs.w.transpose();
        let sigma: Vec<f64> = aw.column_iter().map(|c| c.norm()).collect();
        let b: Vec<f64> = rs.h.iter().zip(&sigma).map(|(h, s)| h * s).collect();
        let r = sigma.len();
        Ball {
            vt: rs.w,
            sigma,
            b,
            outside2: rs.outside * rs.outside,
            eta,
            coef: vec![0.0; r],
            delta: DVector::zeros(r),
        }
    }

    fn feasible(&self) -> bool {
        self.outside2.sqrt() <= self.eta
    }

    /// Squared residual of the projection with multiplier `lambda`, and its derivative.
    fn secular(&self, lambda: f64) -> (f64, f64) {
        let mut f = self.outside2;
        let mut df = 0.0;
        for (k, &s) in self.sigma.iter().enumerate() {
            let e = s * self.coef[k] - self.b[k];
            let q = 1.0 + lambda * s * s;
            f += e * e / (q * q);
            df -= 2.0 * e * e * s * s / (q * q * q);
        }
        (f, df)
    }

    fn project(&mut self, v: &DVector<f64>, x: &mut DVector<f64>) {
        let a = &self.vt * v;
        self.coef.copy_from_slice(a.as_slice());
        let target = self.eta * self.eta;
        x.copy_from(v);
        if self.secular(0.0).0 <= target {
            return;
        }
        let mut hi = 1.0;
        while self.secular(hi).0 > target && hi < 1e300 {
            hi *= 4.0;
        }
        let mut lo = 0.0;
        let mut lambda = hi;
        for _ in 0..200 {
            let (f, df) = self.secular(lambda);
            if f > target {
                lo = lambda;
            } else {
                hi = lambda;
            }
            if (f - target).abs() <= 1e-15 * target || hi - lo <= 1e-15 * hi {
                break;
            }
            let newton = lambda - (f - target) / df;
            lambda = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let lambda = hi.min(lambda.max(lo));
        for (k, &s) in self.sigma.iter().enumerate() {
            let c = (a[k] + lambda * s * self.b[k]) / (1.0 + lambda * s * s);
            self.delta[k] = c - a[k];
        }
        x.gemv_tr(1.0, &self.vt, &self.delta, 1.0);
    }
}

enum Constraint {
    Affine(RowSpace),
    Ball(Ball),
}

impl Constraint {
    fn project(&mut self, v: &DVector<f64>, t: &mut DVector<f64>, x: &mut DVector<f64>) {
        match self {
            Constraint::Affine(rs) => rs.project(v, t, x),
            Constraint::Ball(b) => b.project(v, x),
        }
    }
}

struct Setup<'a> {
    a: &'a DMatrix<f64>,
    g: &'a DVector<f64>,
    eta: f64,
    cfg: &'a SolverConfig,
}

impl Setup<'_> {
    fn violation(&self, x: &DVector<f64>) -> f64 {
        let r = (self.a * x - self.g).norm();
        if self.eta > 0.0 {
            (r - self.eta).max(0.0)
        } else {
            r
        }
    }

    fn feas_limit(&self) -> f64 {
        let gnorm = self.g.norm();
        if self.eta > 0.0 {
            self.eta * self.cfg.feas_tol + self.cfg.feas_tol
        } else {
            self.cfg.feas_tol * (1.0 + gnorm)
        }
    }

    fn finish(&self, solution: DVector<f64>, iterations: usize, stop: StopReason, diagnostic: Option<String>) -> RecoveryResult {
        let primal_residual = self.violation(&solution);
        let converged = matches!(stop, StopReason::Trivial | StopReason::Certified | StopReason::Stagnated)
            && primal_residual <= self.feas_limit();
        RecoveryResult {
            objective: solution.lp_norm(1),
            solution,
            iterations,
            primal_residual,
            converged,
            stop,
            diagnostic,
        }
    }
}

/// `argmin ||x||_1` subject to `A x = g`.
pub fn solve_bp(a: &DMatrix<f64>, g: &DVector<f64>, cfg: &SolverConfig) -> Result<RecoveryResult> {
    check_inputs(a, g, cfg)?;
    let setup = Setup { a, g, eta: 0.0, cfg };
    let n = a.ncols();
    if g.iter().all(|&v| v == 0.0) {
        return Ok(setup.finish(DVector::zeros(n), 0, StopReason::Trivial, None));
    }
    let rs = RowSpace::new(a, g);
    if rs.outside > cfg.feas_tol * (1.0 + g.norm()) {
        let mut x = DVector::zeros(n);
        let mut t = DVector::zeros(rs.w.nrows());
        rs.project(&DVector::zeros(n), &mut t, &mut x);
        let msg = if rs.w.nrows() == 0 {
            "zero matrix with nonzero data".to_string()
        } else {
            format!("data outside the range of A by {:.3e}", rs.outside)
        };
        return Ok(setup.finish(x, 0, StopReason::Infeasible, Some(msg)));
    }
    Ok(iterate(&setup, Constraint::Affine(rs)))
}

/// `argmin ||x||_1` subject to `||A x - g||_2 <= eta`.
pub fn solve_bpdn(a: &DMatrix<f64>, g: &DVector<f64>, eta: f64, cfg: &SolverConfig) -> Result<RecoveryResult> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidInput(format!("noise level {eta} must be finite and >= 0")));
    }
    if eta == 0.0 {
        return solve_bp(a, g, cfg);
    }
    check_inputs(a, g, cfg)?;
    let setup = Setup { a, g, eta, cfg };
    let n = a.ncols();
    if g.norm() <= eta {
        return Ok(setup.finish(DVector::zeros(n), 0, StopReason::Trivial, None));
    }
    let ball = Ball::new(a, g, eta);
    if !ball.feasible() {
        let msg = format!(
            "distance {:.3e} from data to the range of A exceeds eta",
            ball.outside2.sqrt()
        );
        return Ok(setup.finish(DVector::zeros(n), 0, StopReason::Infeasible, Some(msg)));
    }
    Ok(iterate(&setup, Constraint::Ball(ball)))
}

fn iterate(setup: &Setup, mut constraint: Constraint) -> RecoveryResult {
    let (a, g, cfg) = (setup.a, setup.g, setup.cfg);
    let (m, n) = (a.nrows(), a.ncols());
    let op_norm = operator_norm_estimate(a, POWER_ITERS, POWER_SEED);
    // Initial threshold scaled like an entry of the gradient step `Aᵀg / ||A||^2`;
    // residual balancing adjusts it during the first iterations.
    let atg = a.tr_mul(g);
    let mut tau = cfg.step_scale * atg.amax() / (op_norm * op_norm) / (n as f64).sqrt();

    let mut x = DVector::zeros(n);
    let mut z = DVector::zeros(n);
    let mut u = DVector::zeros(n);
    let mut v = DVector::zeros(n);
    let mut t = match &constraint {
        Constraint::Affine(rs) => DVector::zeros(rs.w.nrows()),
        Constraint::Ball(_) => DVector::zeros(0),
    };
    let mut support = vec![false; n];
    let mut support_since = 0usize;
    let mut last_try: Option<(Vec<bool>, usize)> = None;
    let mut prev_obj = f64::INFINITY;
    let mut balanced = 0usize;
    let mut gram = None;
    let mut last_gap: Option<Vec<Vec<usize>>> = None;

    for k in 1..=cfg.max_iters {
        v.copy_from(&z);
        v -= &u;
        constraint.project(&v, &mut t, &mut x);

        let mut r2 = 0.0;
        let mut dz2 = 0.0;
        let mut changed = false;
        for i in 0..n {
            let xr = RELAX * x[i] + (1.0 - RELAX) * z[i];
            let zi = soft(xr + u[i], tau);
            dz2 += (zi - z[i]) * (zi - z[i]);
            r2 += (x[i] - zi) * (x[i] - zi);
            z[i] = zi;
            u[i] += xr - zi;
            if (zi != 0.0) != support[i] {
                support[i] = zi != 0.0;
                changed = true;
            }
        }
        if changed {
            support_since = k;
        }

        if k % BALANCE_EVERY == 0 && balanced < BALANCE_LIMIT && k <= BALANCE_UNTIL {
            let (r, s) = (r2.sqrt(), dz2.sqrt() / tau);
            if r > BALANCE_RATIO * s {
                tau *= 0.5;
                u *= 0.5;
                balanced += 1;
            } else if s > BALANCE_RATIO * r {
                tau *= 2.0;
                u *= 2.0;
                balanced += 1;
            }
        }

        if let Constraint::Affine(_) = &constraint {
            let due = k % CERTIFY_EVERY == 0 && k - support_since >= CERTIFY_EVERY;
            let fresh = match &last_try {
                Some((s, at)) => *s != support || k - at >= CERTIFY_RETRY,
                None => true,
            };
            if due && fresh {
                last_try = Some((support.clone(), k));
                let dual = &u / tau;
                let idx: Vec<usize> = (0..n).filter(|&i| support[i]).collect();
                let shifted = gram.get_or_insert_with(|| shifted_gram(a, op_norm));
                let y0 = shifted.as_ref().map(|c| c.solve(&(a * &dual)));
                if let Polish::Certified(xp) = certify(setup, &idx, y0) {
                    return setup.finish(xp, k, StopReason::Certified, None);
                }
                // A vertex with m nonzeros may have entries too small to
                // survive thresholding; pad with the most active dual entries.
                if idx.len() < m && m <= n {
                    let mut rest: Vec<usize> = (0..n).filter(|&i| !support[i]).collect();
                    rest.sort_by(|&i, &j| dual[j].abs().total_cmp(&dual[i].abs()).then(i.cmp(&j)));
                    let mut padded = idx;
                    padded.extend_from_slice(&rest[..m - padded.len()]);
                    padded.sort_unstable();
                    if let Polish::Certified(xp) = certify(setup, &padded, None) {
                        return setup.finish(xp, k, StopReason::Certified, None);
                    }
                }
            }
        }

        if k % STAGNATION_WINDOW == 0 {
            let obj = x.lp_norm(1);
            let stalled =
                setup.violation(&x) <= setup.feas_limit() && (obj - prev_obj).abs() <= cfg.gap_tol * (1.0 + obj);
            // Slowly converging iterates keep small spurious entries above
            // the threshold; a clear magnitude gap still exposes the support.
            if let Constraint::Affine(_) = &constraint {
                let candidates = gap_supports(&x, m);
                if last_gap.as_ref() != Some(&candidates) || stalled {
                    let dual = &u / tau;
                    let shifted = gram.get_or_insert_with(|| shifted_gram(a, op_norm));
                    let y0 = shifted.as_ref().map(|c| c.solve(&(a * &dual)));
                    let mut best: Option<DVector<f64>> = None;
                    for idx in &candidates {
                        match certify(setup, idx, y0.clone()) {
                            Polish::Certified(xp) => return setup.finish(xp, k, StopReason::Certified, None),
                            Polish::Feasible(xp) => {
                                let l1 = xp.lp_norm(1);
                                if l1 < obj && best.as_ref().is_none_or(|b| l1 < b.lp_norm(1)) {
                                    best = Some(xp);
                                }
                            }
                            Polish::Failed => {}
                        }
                    }
                    if let (true, Some(xp)) = (stalled, best) {
                        return setup.finish(xp, k, StopReason::Stagnated, None);
                    }
                    last_gap = Some(candidates);
                }
            }
            if stalled {
                return setup.finish(x, k, StopReason::Stagnated, None);
            }
            prev_obj = obj;
        }
    }
    let diag = format!("iteration budget {} exhausted", cfg.max_iters);
    setup.finish(x, cfg.max_iters, StopReason::MaxIters, Some(diag))
}

/// Cholesky factor of `A Aᵀ + (DUAL_SHIFT ||A||)^2 I`.
fn shifted_gram(a: &DMatrix<f64>, op_norm: f64) -> Option<Cholesky<f64, Dyn>> {
    let mut gram = a * a.transpose();
    let shift = (DUAL_SHIFT * op_norm).powi(2);
    for i in 0..gram.nrows() {
        gram[(i, i)] += shift;
    }
    gram.cholesky()
}

enum Polish {
    Certified(DVector<f64>),
    /// Feasible, but the dual test failed.
    Feasible(DVector<f64>),
    Failed,
}

/// Candidate supports: the `k <= m` largest magnitudes of `x` for every `k`
/// with `|x|_(k) >= GAP_RATIO |x|_(k+1)`, smallest `k` first.
fn gap_supports(x: &DVector<f64>, m: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    let kmax = m.min(x.len() - 1);
    let mut out = Vec::new();
    for k in 1..=kmax {
        let (hi, lo) = (x[order[k - 1]].abs(), x[order[k]].abs());
        if hi == 0.0 {
            break;
        }
        if hi >= GAP_RATIO * lo {
            let mut idx = order[..k].to_vec();
            idx.sort_unstable();
            out.push(idx);
        }
    }
    out
}

/// Least squares on the columns `idx`. Certified when the (zero-padded)
/// solution is feasible, has no zero entries, and some `y` with
/// `A_Sᵀ y = sign(x_S)` satisfies `||Aᵀ y||_inf <= 1 + gap_tol`; weak duality
/// then bounds the relative optimality gap by `gap_tol`. The `y` tried is the
/// correction of `y0` (or the minimum-norm solution) onto that affine set.
fn certify(setup: &Setup, idx: &[usize], y0: Option<DVector<f64>>) -> Polish {
    let (a, g) = (setup.a, setup.g);
    let k = idx.len();
    if k == 0 || k > a.nrows() {
        return Polish::Failed;
    }
    let a_s = a.select_columns(idx);
    let qr = a_s.clone().qr();
    let r = qr.r();
    let diag = r.diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v.abs()), hi.max(v.abs())));
    if !(lo > 1e-10 * hi) {
        return Polish::Failed;
    }
    let mut qtg = g.clone();
    qr.q_tr_mul(&mut qtg);
    let Some(xs) = r.solve_upper_triangular(&qtg.rows(0, k).into_owned()) else {
        return Polish::Failed;
    };
    if xs.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Polish::Failed;
    }
    if (&a_s * &xs - g).norm() > setup.feas_limit() {
        return Polish::Failed;
    }
    let mut x = DVector::zeros(a.ncols());
    for (&i, &v) in idx.iter().zip(xs.iter()) {
        x[i] = v;
    }
    let signs = xs.map(f64::signum);
    let q = qr.q();
    let zero = DVector::zeros(a.nrows());
    // The corrected iterate dual, then the minimum-norm solution.
    for y0 in y0.iter().chain([&zero]) {
        let corr = a_s.tr_mul(y0) - &signs;
        if let Some(w) = r.tr_solve_upper_triangular(&corr) {
            let y = y0 - &q * w;
            if a.tr_mul(&y).amax() <= 1.0 + setup.cfg.gap_tol {
                return Polish::Certified(x);
            }
        }
    }
    Polish::Feasible(x)
}
