use std::fs;
use std::path::Path;
use std::process::Command;

use rexq::cli::{self, CliError, RunConfig, COMPARISON_Q_SET};

fn config(dir: &Path, extra: &str) -> RunConfig {
    let text = format!("output = {:?}\n{extra}", dir.display().to_string());
    RunConfig::from_toml(&text).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rexq"))
}

#[test]
fn run_writes_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "objective = \"griewank\"\ndimension = 5\nmax_iterations = 50\ntol = 0",
    );
    let r = cli::cmd_run(&cfg).unwrap();
    assert_eq!(r.iterations, 50);
    for f in [
        "config.toml",
        "summary.csv",
        "occupancy.csv",
        "exchange.csv",
        "round_trips.csv",
    ] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    for level in 1..=5 {
        let trace =
            fs::read_to_string(tmp.path().join(format!("trace_level_{level}.csv"))).unwrap();
        let mut lines = trace.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iteration,q,global_best_score,diversity,gamma"
        );
        assert_eq!(lines.count(), 51);
    }
    let occ = fs::read_to_string(tmp.path().join("occupancy.csv")).unwrap();
    assert_eq!(occ.lines().count(), 6);
    let echo =
        RunConfig::from_toml(&fs::read_to_string(tmp.path().join("config.toml")).unwrap()).unwrap();
    assert_eq!(echo.rex_params(), cfg.rex_params());
}

#[test]
fn single_swarm_run_has_one_trace_and_no_exchange_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "algorithm = \"qgsqpo\"\nq = 1.5\nmax_iterations = 20\ntol = 0",
    );
    cli::cmd_run(&cfg).unwrap();
    assert!(tmp.path().join("trace_level_1.csv").exists());
    assert!(!tmp.path().join("trace_level_2.csv").exists());
    assert!(!tmp.path().join("occupancy.csv").exists());
}

#[test]
fn sweep_k_rows_and_empty_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "k_list = [1.0, 0.1]\nseeds = 2\nmax_iterations = 30\ntol = 0",
    );
    let rows = cli::cmd_sweep_k(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    let csv = fs::read_to_string(tmp.path().join("sweep_k.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let empty = config(tmp.path(), "k_list = []");
    match cli::cmd_sweep_k(&empty) {
        Err(CliError::Config { key, .. }) => assert_eq!(key, "k_list"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn compare_row_accounting() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "d_list = [5, 10]\nseeds = 3\namplitudes = [0.5]\nmax_iterations = 10",
    );
    let rows = cli::cmd_compare(&cfg).unwrap();
    assert_eq!(rows.len(), 2 * (1 + COMPARISON_Q_SET.len() + 1));
    assert!(rows.iter().all(|r| r.runs == 3));
    let runs = fs::read_to_string(tmp.path().join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 7 * 3);
}

#[test]
fn fold_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "objective = \"go12\"\nmax_iterations = 40\nsample_every = 10",
    );
    let out = cli::cmd_fold(&cfg).unwrap();
    assert_eq!(out.scatter.len(), 5 * 6);
    let scatter = fs::read_to_string(tmp.path().join("scatter.csv")).unwrap();
    assert_eq!(
        scatter.lines().next().unwrap(),
        "iteration,level,q,best_energy,rmsd"
    );
    let ext = fs::read_to_string(tmp.path().join("diversity_extremes.csv")).unwrap();
    assert_eq!(ext.lines().count(), 42);
    // default exchange interval for the peptide is 10
    assert_eq!(
        out.result.exchange.iter().map(|p| p.attempts).sum::<u64>(),
        4
    );
}

#[test]
fn binary_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    fs::write(
        &cfg_path,
        "objective = \"rastrigin\"\ndimension = 4\nmax_iterations = 40\ntol = 0\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let dir = tmp.path().join(name);
        let status = bin()
            .arg("run")
            .arg(&cfg_path)
            .args(["--seed", "17", "--output"])
            .arg(&dir)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        let mut files: Vec<_> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        outputs.push(
            files
                .iter()
                .filter(|p| p.file_name().unwrap() != "config.toml")
                .map(|p| (p.file_name().unwrap().to_owned(), fs::read(p).unwrap()))
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(outputs[0].len() >= 9);
}

#[test]
fn binary_reports_the_offending_key() {
    let out = bin()
        .args(["run", "--replicas", "3", "--algorithm", "gsqpo"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`replicas`"), "{err}");

    let out = bin().args(["run", "--k", "-1"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`k`"));
}
