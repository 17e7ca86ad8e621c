//! `legcs`: command-line driver for the recovery experiments, the lemma
//! checks and the sample-complexity formulas.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use legendre_cs::experiments::{
    emit_csv, emit_svg, emit_trials_csv, run, ExperimentKind, ExperimentSpec, PlotStyle, Window,
};
use legendre_cs::sampling::{compute_test_value, group_by_rank, is_preferable_1d, read_sample_set_csv};
use legendre_cs::theory::{
    complexity_1d, complexity_bos, complexity_multi, lemma_validators, write_report_csv, LemmaConfig, REParams,
};

#[derive(Parser)]
#[command(name = "legcs", version, about = "Sparse Legendre recovery experiments")]
struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV and SVG files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Multiplies trial counts, in (0, 1]; at least 10 trials are kept.
    #[arg(long, global = true)]
    scale: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with defaults for the options above and per-experiment
    /// overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Success against sparsity for three degree windows.
    Fig1,
    /// Recovery by test-value group at m = 180.
    Quintiles,
    /// Recovery against the number of samples.
    Msweep,
    /// Recovery against sparsity at m = 180.
    Ssweep,
    /// Monte Carlo checks of the probabilistic lemmas.
    CheckLemmas {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        sets: Option<usize>,
    },
    /// Evaluates the sample-complexity formulas.
    Complexity(ComplexityArgs),
    /// Scores sample-set CSV files by test value and ranks them.
    ScoreSets {
        #[arg(long, default_value_t = 0.8)]
        gamma0: f64,
        #[arg(long, default_value_t = 5)]
        groups: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long, default_value_t = 10)]
    s: usize,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma0: f64,
    /// Number of basis functions.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Dimension for the multivariate count.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Universal constant.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Uniform bound squared for the classical count (default 2 j_max + 1
    /// of the window 1801..2000).
    #[arg(long, default_value_t = 4001.0)]
    theta2: f64,
}

/// Config file schema. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    scale: Option<f64>,
    threads: Option<usize>,
    fig1: Option<Overrides>,
    quintiles: Option<Overrides>,
    msweep: Option<Overrides>,
    ssweep: Option<Overrides>,
    lemmas: Option<LemmaOverrides>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    trials: Option<usize>,
    sparsities: Option<Vec<usize>>,
    m_grid: Option<Vec<usize>>,
    /// Degree windows as `[lo, hi]` pairs.
    windows: Option<Vec<[usize; 2]>>,
    gamma0: Option<f64>,
    groups: Option<usize>,
    chebyshev: Option<bool>,
    success_tol: Option<f64>,
    max_iters: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LemmaOverrides {
    samples: Option<usize>,
    sets: Option<usize>,
}

impl Overrides {
    fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(v) = self.trials {
            spec.trials = v;
        }
        if let Some(v) = &self.sparsities {
            spec.sparsities.clone_from(v);
        }
        if let Some(v) = &self.m_grid {
            spec.m_grid.clone_from(v);
        }
        if let Some(v) = &self.windows {
            spec.windows = v.iter().map(|&[lo, hi]| Window::new(lo, hi)).collect();
        }
        if let Some(v) = self.gamma0 {
            spec.gamma0 = v;
        }
        if let Some(v) = self.groups {
            spec.n_groups = v;
        }
        if let Some(v) = self.chebyshev {
            spec.chebyshev = v;
        }
        if let Some(v) = self.success_tol {
            spec.success_tol = v;
        }
        if let Some(v) = self.max_iters {
            spec.solver.max_iters = v;
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run_experiment(kind: ExperimentKind, cfg: &Config, seed: Option<u64>, scale: f64, out_dir: &Path) -> Result<()> {
    let mut spec = ExperimentSpec::default_for(kind);
    let overrides = match kind {
        ExperimentKind::Fig1 => &cfg.fig1,
        ExperimentKind::Quintiles => &cfg.quintiles,
        ExperimentKind::MSweep => &cfg.msweep,
        ExperimentKind::SSweep => &cfg.ssweep,
    };
    if let Some(o) = overrides {
        o.apply(&mut spec);
    }
    if let Some(seed) = seed {
        spec.master_seed = seed;
    }
    let spec = spec.scaled(scale)?;
    spec.validate()?;
    eprintln!("{}: {} trials per point, seed {}", kind.id(), spec.trials, spec.master_seed);

    let out = run(&spec)?;
    let id = kind.id();
    emit_trials_csv(&out.records, &out_dir.join(format!("{id}_trials.csv")))?;
    emit_csv(&out.summary, &out_dir.join(format!("{id}_summary.csv")))?;
    emit_svg(&out.summary, &out_dir.join(format!("{id}.svg")), &PlotStyle::default())?;

    println!("case\tgroup\ts\tm\tcount\tmean_rel_l2\tsuccess\t95% CI");
    for r in &out.summary.rows {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{:.3e}\t{:.3}\t[{:.3}, {:.3}]",
            r.case, r.group, r.s, r.m, r.count, r.mean_rel_l2, r.success_rate, r.wilson_lo, r.wilson_hi
        );
    }
    let unconverged: usize = out.records.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        eprintln!("warning: {unconverged} solves hit the iteration limit");
    }
    eprintln!("wrote {}", out_dir.display());
    Ok(())
}

fn check_lemmas(cfg: &Config, seed: Option<u64>, samples: Option<usize>, sets: Option<usize>, out_dir: &Path) -> Result<bool> {
    let mut lc = LemmaConfig::default();
    if let Some(o) = &cfg.lemmas {
        lc.samples = o.samples.unwrap_or(lc.samples);
        lc.sets = o.sets.unwrap_or(lc.sets);
    }
    lc.samples = samples.unwrap_or(lc.samples);
    lc.sets = sets.unwrap_or(lc.sets);
    if let Some(seed) = seed {
        lc.seed = seed;
    }
    let report = lemma_validators(&lc)?;
    let path = out_dir.join("lemmas.csv");
    write_report_csv(&report, &path)?;
    for c in &report.checks {
        let verdict = match c.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        };
        println!(
            "{:<28} {:<32} {:.6e} {} {:.6e} (3sigma {:.1e}) {verdict}",
            c.lemma, c.params, c.lhs, c.relation, c.rhs, c.three_sigma
        );
    }
    eprintln!("wrote {}", path.display());
    Ok(report.all_pass())
}

fn complexity(a: &ComplexityArgs) -> Result<()> {
    let p = REParams {
        s: a.s,
        alpha: a.alpha,
        delta: a.delta,
        gamma: a.gamma,
        gamma0: a.gamma0,
        n: a.n,
        d: 1,
        c: a.c,
    };
    let show = |name: &str, v: legendre_cs::Result<f64>| match v {
        Ok(v) => println!("{name:<34} {v:.6e}"),
        Err(e) => println!("{name:<34} error: {e}"),
    };
    show("univariate", complexity_1d(&p, false));
    show("univariate, preferable set", complexity_1d(&p, true));
    let pd = REParams { d: a.d, ..p };
    for (name, prefset) in [("multivariate", false), ("multivariate, preferable set", true)] {
        match complexity_multi(&pd, prefset) {
            Ok(fp) => println!(
                "{:<34} {:.6e} (d = {}, {} iterations, residual {:.1e})",
                name, fp.m, a.d, fp.iterations, fp.residual
            ),
            Err(e) => println!("{name:<34} error: {e}"),
        }
    }
    let bos = complexity_bos(&p, a.theta2.sqrt());
    let exceeds = matches!(bos, Ok(v) if v > a.n as f64);
    show("bounded orthonormal system", bos);
    if exceeds {
        println!("classical count exceeds N = {}", a.n);
    }
    Ok(())
}

fn score_sets(files: &[PathBuf], gamma0: f64, groups: usize, out_dir: &Path) -> Result<()> {
    let mut rows = Vec::with_capacity(files.len());
    for f in files {
        let q = read_sample_set_csv(f)?;
        let t = compute_test_value(&q, gamma0)?.value;
        let pref = if q.dim() == 1 {
            is_preferable_1d(&q, gamma0)?.to_string()
        } else {
            String::new()
        };
        rows.push((f.display().to_string(), q.m(), q.dim(), q.seed(), t, pref));
    }
    let n_groups = groups.clamp(1, rows.len());
    let keys: Vec<(f64, u64)> = rows.iter().map(|r| (r.4, r.3)).collect();
    let mut group_of = vec![1; rows.len()];
    if n_groups >= 2 {
        for (k, members) in group_by_rank(&keys, n_groups).into_iter().enumerate() {
            for i in members {
                group_of[i] = k + 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| (group_of[a], rows[a].4).partial_cmp(&(group_of[b], rows[b].4)).unwrap());
    let mut csv = String::from("file,m,d,test_value,group,preferable\n");
    for &i in &order {
        let (file, m, d, _, t, pref) = &rows[i];
        println!("{:>3}  {t:.6e}  q{}  {file}", order.iter().position(|&j| j == i).unwrap_or(0) + 1, group_of[i]);
        csv.push_str(&format!("{file},{m},{d},{t},q{},{pref}\n", group_of[i]));
    }
    let path = out_dir.join("scores.csv");
    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = load_config(cli.config.as_deref())?;
    let seed = cli.seed.or(cfg.seed);
    let scale = cli.scale.or(cfg.scale).unwrap_or(1.0);
    let out_dir = cli.out_dir.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    if let Some(t) = cli.threads.or(cfg.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    match &cli.command {
        Command::Fig1 => run_experiment(ExperimentKind::Fig1, &cfg, seed, scale, &out_dir),
        Command::Quintiles => run_experiment(ExperimentKind::Quintiles, &cfg, seed, scale, &out_dir),
        Command::Msweep => run_experiment(ExperimentKind::MSweep, &cfg, seed, scale, &out_dir),
        Command::Ssweep => run_experiment(ExperimentKind::SSweep, &cfg, seed, scale, &out_dir),
        Command::CheckLemmas { samples, sets } => {
            if !check_lemmas(&cfg, seed, *samples, *sets, &out_dir)? {
                bail!("some lemma checks failed");
            }
            Ok(())
        }
        Command::Complexity(a) => complexity(a),
        Command::ScoreSets { files, gamma0, groups } => score_sets(files, *gamma0, *groups, &out_dir),
    }
}
