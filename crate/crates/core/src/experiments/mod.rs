//! Deterministic batch experiments.
//!
//! Four recovery studies, all noiseless basis pursuit with Gaussian sparse
//! coefficients on random supports:
//!
//! * `fig1`: three degree windows of size 200, `m = 100`, a fresh uniform
//!   sample set per trial, success against sparsity;
//! * `quintiles`: 1000 uniform sets of 180 points for the window
//!   `{1, ..., 360}`, split into five groups by test value (`gamma0 = 0.8`),
//!   one signal per set and sparsity;
//! * `msweep`: `s = 14`, `m` from 10 to 180; per `m`, 1500 uniform sets
//!   (grouped by test value) and 1500 Chebyshev sets with the
//!   preconditioned matrix;
//! * `ssweep`: the same four series at `m = 180` with growing sparsity.
//!
//! Every trial seed is `derive_seed(master, [experiment, case, s, m, trial])`
//! with string keys hashed by `label_key`. Sample sets that are shared
//! across sparsities use the key `s = 0`. Results are sorted before
//! aggregation, so outputs do not depend on the thread count.

mod plot;
mod summary;

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::basis::{make_window_set, IndexSet};
use crate::error::{Error, Result};
use crate::measurement::{assemble, assemble_preconditioned, gen_sparse_signal};
use crate::rng::{derive_seed, label_key};
use crate::sampling::{draw_chebyshev, draw_uniform, rank_into_groups, SampleSet};
use crate::solver::{recovery_metrics, solve_bp, SolverConfig};

pub use plot::{emit_svg, PlotStyle};
pub use summary::{
    emit_csv, emit_trials_csv, read_summary_csv, summarize, wilson_interval, SummaryRow, SummaryTable, TrialRecord,
    TRIAL_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    Fig1,
    Quintiles,
    MSweep,
    SSweep,
}

impl ExperimentKind {
    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::Quintiles => "quintiles",
            ExperimentKind::MSweep => "msweep",
            ExperimentKind::SSweep => "ssweep",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        [Self::Fig1, Self::Quintiles, Self::MSweep, Self::SSweep]
            .into_iter()
            .find(|k| k.id() == id)
    }
}

/// A contiguous univariate degree window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub label: String,
    pub lo: usize,
    pub hi: usize,
}

impl Window {
    pub fn new(lo: usize, hi: usize) -> Self {
        Window {
            label: format!("{lo}-{hi}"),
            lo,
            hi,
        }
    }

    fn index_set(&self) -> Result<IndexSet> {
        make_window_set(self.lo, self.hi)
    }
}

pub const UNIFORM: &str = "uniform";
pub const CHEBYSHEV: &str = "chebyshev";
pub const ALL: &str = "all";

/// Label of the `k`-th test-value group (0-based), lowest first.
pub fn group_label(k: usize) -> String {
    format!("q{}", k + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    /// Trials per point (`fig1`) or sample sets per point (the others).
    pub trials: usize,
    pub sparsities: Vec<usize>,
    pub m_grid: Vec<usize>,
    /// `fig1` compares several windows; the other experiments use one.
    pub windows: Vec<Window>,
    pub gamma0: f64,
    pub n_groups: usize,
    /// Adds the preconditioned Chebyshev series (`msweep`, `ssweep`).
    pub chebyshev: bool,
    pub solver: SolverConfig,
    /// Success means relative l2 error at most this.
    pub success_tol: f64,
}

const DEFAULT_SEED: u64 = 20_180_101;
const SUCCESS_TOL: f64 = 1e-4;
const MIN_SCALED_TRIALS: usize = 10;

impl ExperimentSpec {
    pub fn fig1() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::Fig1,
            master_seed: DEFAULT_SEED,
            trials: 100,
            sparsities: (1..=8).map(|k| 5 * k).collect(),
            m_grid: vec![100],
            windows: vec![Window::new(1, 200), Window::new(301, 500), Window::new(1801, 2000)],
            gamma0: 0.8,
            n_groups: 1,
            chebyshev: false,
            solver: SolverConfig::default(),
            success_tol: SUCCESS_TOL,
        }
    }

    pub fn quintiles() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::Quintiles,
            trials: 1000,
            sparsities: vec![30, 40],
            m_grid: vec![180],
            windows: vec![Window::new(1, 360)],
            n_groups: 5,
            ..Self::fig1()
        }
    }

    pub fn msweep() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::MSweep,
            trials: 1500,
            sparsities: vec![14],
            m_grid: (1..=18).map(|k| 10 * k).collect(),
            chebyshev: true,
            ..Self::quintiles()
        }
    }

    pub fn ssweep() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::SSweep,
            sparsities: (1..=12).map(|k| 5 * k).collect(),
            m_grid: vec![180],
            ..Self::msweep()
        }
    }

    pub fn default_for(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::Fig1 => Self::fig1(),
            ExperimentKind::Quintiles => Self::quintiles(),
            ExperimentKind::MSweep => Self::msweep(),
            ExperimentKind::SSweep => Self::ssweep(),
        }
    }

    /// Multiplies the trial count by `scale` (in `(0, 1]`), keeping at
    /// least 10 trials.
    pub fn scaled(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(Error::InvalidInput(format!("scale = {scale} must lie in (0, 1]")));
        }
        let scaled = (self.trials as f64 * scale).round() as usize;
        self.trials = scaled.max(MIN_SCALED_TRIALS).min(self.trials);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        let problem = if self.trials == 0 {
            Some("trials must be >= 1".to_string())
        } else if self.sparsities.is_empty() || self.m_grid.is_empty() || self.windows.is_empty() {
            Some("sparsity grid, m grid and windows must be nonempty".to_string())
        } else if self.sparsities.contains(&0) || self.m_grid.contains(&0) {
            Some("sparsities and sample counts must be >= 1".to_string())
        } else if self.kind != ExperimentKind::Fig1 && self.windows.len() != 1 {
            Some(format!("{} uses exactly one window", self.kind.id()))
        } else if self.n_groups == 0 || (self.kind != ExperimentKind::Fig1 && self.n_groups > self.trials) {
            Some(format!("cannot split {} sets into {} groups", self.trials, self.n_groups))
        } else if !(self.gamma0 > 0.0 && self.gamma0 < 1.0) {
            Some(format!("gamma0 = {} must lie in (0, 1)", self.gamma0))
        } else if !(self.success_tol > 0.0) {
            Some("success_tol must be positive".to_string())
        } else {
            None
        };
        if let Some(p) = problem {
            return Err(Error::InvalidInput(p));
        }
        for w in &self.windows {
            let n = w.hi.checked_sub(w.lo).map(|d| d + 1).unwrap_or(0);
            if let Some(&s) = self.sparsities.iter().find(|&&s| s > n) {
                return Err(Error::InvalidInput(format!(
                    "sparsity {s} exceeds the window size {n} of {}",
                    w.label
                )));
            }
        }
        Ok(())
    }
}

/// Trial records (sorted) and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub records: Vec<TrialRecord>,
    pub summary: SummaryTable,
}

/// One solve to perform.
struct Task<'a> {
    case: &'a str,
    group: String,
    s: usize,
    m: usize,
    trial: usize,
    seed: u64,
    matrix: MatrixSource<'a>,
}

enum MatrixSource<'a> {
    /// Draw a uniform set from this seed and assemble.
    Fresh { set: &'a IndexSet, seed: u64 },
    Shared(&'a DMatrix<f64>),
}

fn trial_seed(spec: &ExperimentSpec, case: &str, s: usize, m: usize, trial: usize) -> u64 {
    derive_seed(
        spec.master_seed,
        &[label_key(spec.kind.id()), label_key(case), s as u64, m as u64, trial as u64],
    )
}

fn run_task(spec: &ExperimentSpec, n: usize, task: &Task) -> Result<TrialRecord> {
    let start = Instant::now();
    let owned;
    let a = match &task.matrix {
        MatrixSource::Fresh { set, seed } => {
            let q = draw_uniform(task.m, 1, *seed)?;
            owned = assemble(set, &q)?.into_matrix();
            &owned
        }
        MatrixSource::Shared(a) => *a,
    };
    let c = gen_sparse_signal(n, task.s, derive_seed(task.seed, &[1]))?;
    let g = a * c.to_dense();
    let result = solve_bp(a, &g, &spec.solver)?;
    let metrics = recovery_metrics(&c, &result, spec.success_tol)?;
    Ok(TrialRecord {
        experiment: spec.kind.id().to_string(),
        case: task.case.to_string(),
        group: task.group.clone(),
        s: task.s,
        m: task.m,
        trial: task.trial,
        seed: task.seed,
        rel_l2: metrics.rel_l2,
        rel_l1: metrics.rel_l1,
        success: metrics.success,
        iterations: result.iterations,
        converged: result.converged,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn execute(spec: &ExperimentSpec, n: usize, tasks: &[Task]) -> Result<Vec<TrialRecord>> {
    tasks.par_iter().map(|t| run_task(spec, n, t)).collect()
}

fn finish(spec: &ExperimentSpec, mut records: Vec<TrialRecord>) -> ExperimentRun {
    records.sort_by(|a, b| (&a.case, a.s, a.m, a.trial).cmp(&(&b.case, b.s, b.m, b.trial)));
    let summary = summarize(&records, &case_order(spec));
    ExperimentRun { records, summary }
}

fn case_order(spec: &ExperimentSpec) -> Vec<String> {
    match spec.kind {
        ExperimentKind::Fig1 => spec.windows.iter().map(|w| w.label.clone()).collect(),
        _ => {
            let mut v = vec![UNIFORM.to_string()];
            if spec.chebyshev {
                v.push(CHEBYSHEV.to_string());
            }
            v
        }
    }
}

/// Runs the experiment named by `spec.kind`.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    match spec.kind {
        ExperimentKind::Fig1 => run_fig1(spec),
        ExperimentKind::Quintiles => run_quintiles(spec),
        ExperimentKind::MSweep => run_msweep(spec),
        ExperimentKind::SSweep => run_ssweep(spec),
    }
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::InvalidInput(format!(
            "spec is for {}, not {}",
            spec.kind.id(),
            kind.id()
        )));
    }
    Ok(())
}

/// Recovery against sparsity for several degree windows, with a fresh
/// uniform sample set in every trial.
pub fn run_fig1(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    expect_kind(spec, ExperimentKind::Fig1)?;
    let mut records = Vec::new();
    for w in &spec.windows {
        let set = w.index_set()?;
        let mut tasks = Vec::new();
        for &s in &spec.sparsities {
            for &m in &spec.m_grid {
                for trial in 0..spec.trials {
                    let seed = trial_seed(spec, &w.label, s, m, trial);
                    tasks.push(Task {
                        case: &w.label,
                        group: ALL.to_string(),
                        s,
                        m,
                        trial,
                        seed,
                        matrix: MatrixSource::Fresh {
                            set: &set,
                            seed: derive_seed(seed, &[0]),
                        },
                    });
                }
            }
        }
        records.extend(execute(spec, set.len(), &tasks)?);
    }
    Ok(finish(spec, records))
}

/// Uniform sets of size `m` for one experiment, ranked into groups.
struct GroupedSets {
    matrices: Vec<DMatrix<f64>>,
    group_of: Vec<usize>,
}

fn uniform_sets(spec: &ExperimentSpec, set: &IndexSet, m: usize) -> Result<GroupedSets> {
    let draws: Vec<SampleSet> = (0..spec.trials)
        .into_par_iter()
        .map(|i| draw_uniform(m, 1, trial_seed(spec, UNIFORM, 0, m, i)))
        .collect::<Result<_>>()?;
    let groups = rank_into_groups(&draws, spec.gamma0, spec.n_groups.max(2))?;
    let mut group_of = vec![0; draws.len()];
    for (k, members) in groups.iter().enumerate() {
        for &i in members {
            group_of[i] = k;
        }
    }
    let matrices = draws
        .par_iter()
        .map(|q| Ok(assemble(set, q)?.into_matrix()))
        .collect::<Result<_>>()?;
    Ok(GroupedSets { matrices, group_of })
}

fn chebyshev_sets(spec: &ExperimentSpec, set: &IndexSet, m: usize) -> Result<Vec<DMatrix<f64>>> {
    (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let q = draw_chebyshev(m, 1, trial_seed(spec, CHEBYSHEV, 0, m, i))?;
            Ok(assemble_preconditioned(set, &q)?.into_matrix())
        })
        .collect()
}

/// Grouped uniform sets (and optionally Chebyshev sets) for every `m`, one
/// signal per set and sparsity.
fn run_grouped(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    let set = spec.windows[0].index_set()?;
    let mut records = Vec::new();
    for &m in &spec.m_grid {
        let uniform = uniform_sets(spec, &set, m)?;
        let cheb = if spec.chebyshev {
            Some(chebyshev_sets(spec, &set, m)?)
        } else {
            None
        };
        let mut tasks = Vec::new();
        for &s in &spec.sparsities {
            for (i, a) in uniform.matrices.iter().enumerate() {
                tasks.push(Task {
                    case: UNIFORM,
                    group: group_label(uniform.group_of[i]),
                    s,
                    m,
                    trial: i,
                    seed: trial_seed(spec, UNIFORM, s, m, i),
                    matrix: MatrixSource::Shared(a),
                });
            }
            for (i, a) in cheb.iter().flatten().enumerate() {
                tasks.push(Task {
                    case: CHEBYSHEV,
                    group: ALL.to_string(),
                    s,
                    m,
                    trial: i,
                    seed: trial_seed(spec, CHEBYSHEV, s, m, i),
                    matrix: MatrixSource::Shared(a),
                });
            }
        }
        records.extend(execute(spec, set.len(), &tasks)?);
    }
    Ok(finish(spec, records))
}

/// Recovery by test-value group at fixed `m`.
pub fn run_quintiles(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    expect_kind(spec, ExperimentKind::Quintiles)?;
    run_grouped(spec)
}

/// Recovery against `m` for the test-value groups and Chebyshev sampling.
pub fn run_msweep(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    expect_kind(spec, ExperimentKind::MSweep)?;
    run_grouped(spec)
}

/// Recovery against sparsity for the test-value groups and Chebyshev
/// sampling.
pub fn run_ssweep(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    expect_kind(spec, ExperimentKind::SSweep)?;
    run_grouped(spec)
}
