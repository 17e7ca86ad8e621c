use std::path::Path;
use std::process::{Command, Output};

use legendre_cs::sampling::{draw_uniform, write_sample_set_csv};

fn legcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_legcs")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn complexity_reports_the_classical_count() {
    let o = legcs(&["complexity", "--s", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("bounded orthonormal system"));
    assert!(text.contains("classical count exceeds N = 200"));
    assert!(text.contains("multivariate"));
}

#[test]
fn config_file_drives_a_small_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "seed = 7\nthreads = 1\n\n[msweep]\ntrials = 10\nm_grid = [30]\nsparsities = [3]\nwindows = [[1, 60]]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = |out: &Path| {
        let o = legcs(&["--config", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "msweep"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("msweep_summary.csv")).unwrap()
    };
    let first = run(&out);
    for name in ["msweep_trials.csv", "msweep_summary.csv", "msweep.svg"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let trials = std::fs::read_to_string(out.join("msweep_trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 20);
    assert_eq!(first, run(&dir.path().join("again")));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[fig1]\ntrails = 3\n").unwrap();
    let o = legcs(&["--config", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "fig1"]);
    assert!(!o.status.success());
}

#[test]
fn score_sets_ranks_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for seed in 0..6 {
        let path = dir.path().join(format!("set{seed}.csv"));
        write_sample_set_csv(&draw_uniform(50, 1, seed).unwrap(), &path).unwrap();
        files.push(path.to_str().unwrap().to_string());
    }
    let mut args = vec!["--out-dir", dir.path().to_str().unwrap(), "score-sets", "--groups", "3"];
    args.extend(files.iter().map(String::as_str));
    let o = legcs(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("scores.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    let scores: Vec<f64> = rows.iter().map(|r| r.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(rows.iter().filter(|r| r.contains(",q1,")).count(), 2);
}
