use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ALL;
use crate::error::{Error, Result};

pub const TRIAL_HEADER: &str = "experiment,case,group,s,m,trial,seed,rel_l2,rel_l1,success,iterations,wall_ms";

const SUMMARY_HEADER: &str =
    "experiment,case,group,s,m,count,successes,mean_rel_l2,success_rate,wilson_lo,wilson_hi,unconverged";

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959963984540054;

/// One solve. `converged` is kept in memory for the summary but is not part
/// of the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    pub case: String,
    pub group: String,
    pub s: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub rel_l2: f64,
    pub rel_l1: f64,
    pub success: bool,
    pub iterations: usize,
    #[serde(skip, default = "converged_default")]
    pub converged: bool,
    /// Not reproducible; excluded when comparing runs.
    pub wall_ms: f64,
}

fn converged_default() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub case: String,
    pub group: String,
    pub s: usize,
    pub m: usize,
    pub count: usize,
    pub successes: usize,
    pub mean_rel_l2: f64,
    pub success_rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub unconverged: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, case: &str, group: &str, s: usize, m: usize) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.case == case && r.group == group && r.s == s && r.m == m)
    }
}

/// 95% Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    // p lies inside mathematically; the clamps absorb rounding at p = 0, 1
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

#[derive(Default)]
struct Acc {
    experiment: String,
    count: usize,
    successes: usize,
    sum_l2: f64,
    unconverged: usize,
}

fn group_rank(group: &str) -> (usize, String) {
    match group.strip_prefix('q').and_then(|k| k.parse::<usize>().ok()) {
        Some(k) => (k, String::new()),
        None if group == ALL => (usize::MAX, String::new()),
        None => (usize::MAX - 1, group.to_string()),
    }
}

/// Groups records by `(case, group, s, m)`. Records of a test-value group
/// also count towards the `all` row of their case. Rows are ordered by
/// `case_order` (unknown cases last, by name), then group, `s` and `m`.
pub fn summarize(records: &[TrialRecord], case_order: &[String]) -> SummaryTable {
    type Key = ((usize, String), (usize, String), usize, usize);
    let case_key = |c: &str| match case_order.iter().position(|x| x == c) {
        Some(i) => (i, String::new()),
        None => (case_order.len(), c.to_string()),
    };
    let mut accs: BTreeMap<Key, (String, String, Acc)> = BTreeMap::new();
    for r in records {
        let mut groups = vec![r.group.as_str()];
        if r.group != ALL {
            groups.push(ALL);
        }
        for g in groups {
            let key = (case_key(&r.case), group_rank(g), r.s, r.m);
            let (_, _, acc) = accs
                .entry(key)
                .or_insert_with(|| (r.case.clone(), g.to_string(), Acc::default()));
            acc.experiment.clone_from(&r.experiment);
            acc.count += 1;
            acc.successes += usize::from(r.success);
            acc.sum_l2 += r.rel_l2;
            acc.unconverged += usize::from(!r.converged);
        }
    }
    let rows = accs
        .into_iter()
        .map(|((_, _, s, m), (case, group, acc))| {
            let (wilson_lo, wilson_hi) = wilson_interval(acc.successes, acc.count);
            SummaryRow {
                experiment: acc.experiment,
                case,
                group,
                s,
                m,
                count: acc.count,
                successes: acc.successes,
                mean_rel_l2: acc.sum_l2 / acc.count as f64,
                success_rate: acc.successes as f64 / acc.count as f64,
                wilson_lo,
                wilson_hi,
                unconverged: acc.unconverged,
            }
        })
        .collect();
    SummaryTable { rows }
}

fn write_rows<T: Serialize>(rows: &[T], header: &str, path: &Path) -> Result<()> {
    if rows.is_empty() {
        let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
        return writeln!(f, "{header}").map_err(|e| Error::io(path, e));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the summary as CSV; an empty table gives the header line only.
pub fn emit_csv(table: &SummaryTable, path: &Path) -> Result<()> {
    write_rows(&table.rows, SUMMARY_HEADER, path)
}

pub fn emit_trials_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    write_rows(records, TRIAL_HEADER, path)
}

pub fn read_summary_csv(path: &Path) -> Result<SummaryTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?;
    if header.iter().collect::<Vec<_>>().join(",") != SUMMARY_HEADER {
        return Err(Error::InvalidInput(format!("{} is not a summary CSV", path.display())));
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<SummaryRow>, _>>()
        .map_err(|e| Error::csv(path, e))?;
    Ok(SummaryTable { rows })
}
