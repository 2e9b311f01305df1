//! End-to-end tests of the batch runner binary: exit codes, validation
//! messages, CSV schemas, config echo round-trips, and the seed battery.

use std::path::Path;
use std::process::Command;

use pathspace_lab::config::ExperimentConfig;
use pathspace_lab::report::Verdict;
use pathspace_lab::runner;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pathspace"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn list_catalog_names_everything() {
    let out = bin().arg("--list-catalog").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["liyau", "gaussian-bump", "sphere", "ramp", "cameron-martin"] {
        assert!(text.contains(needle), "catalog missing {needle}");
    }
}

#[test]
fn run_exits_zero_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "liyau.json",
        r#"{"experiment": "liyau", "paths": 5000, "steps": 100, "seed": 3}"#,
    );
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("experiment,label,component,estimate,stderr,N,seed,dt,T,model,verdict"));
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("lhs path"));
    assert!(summary.contains("effective config"));
}

#[test]
fn off_grid_time_exits_one_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"experiment": "harnack", "paths": 1000, "steps": 1000,
            "function": {"name": "gaussian-bump", "times": [0.3333]}}"#,
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not on grid"), "stderr: {err}");
}

#[test]
fn unknown_experiment_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"experiment": "nope"}"#);
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unsupported_oracle_request_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Li-Yau needs a flow oracle; hyperbolic space has none.
    let cfg = write_config(
        dir.path(),
        "hyp.json",
        r#"{"experiment": "liyau", "model": {"kind": "hyperbolic", "dim": 2, "radius": 1.0},
            "paths": 1000, "steps": 100}"#,
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_emits_sweep_column_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "en.json",
        r#"{"experiment": "error-norms",
            "model": {"kind": "sphere", "dim": 2, "radius": 1.0},
            "paths": 2000, "steps": 100, "seed": 5}"#,
    );
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("sweep")
        .arg(&cfg)
        .args(["--param", "r", "--values", "1,2,4"])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("sweep,experiment,"));
    // Monotone decrease of the plain norm across the radius column.
    let mut plains = Vec::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[3] == "plain" {
            plains.push(cols[4].parse::<f64>().unwrap());
        }
    }
    assert_eq!(plains.len(), 3);
    assert!(plains[0] > plains[1] && plains[1] > plains[2], "{plains:?}");
}

#[test]
fn echoed_config_reproduces_csv_bytes() {
    let config = ExperimentConfig::from_json(
        r#"{"experiment": "ibp", "paths": 3000, "steps": 100, "seed": 11}"#,
    )
    .unwrap();
    let first = runner::run(&config).unwrap();
    // The summary embeds the effective config; parse it back out and re-run.
    let marker = "byte-for-byte):\n";
    let idx = first.summary.find(marker).unwrap() + marker.len();
    let echoed = ExperimentConfig::from_json(first.summary[idx..].trim()).unwrap();
    let second = runner::run(&echoed).unwrap();
    assert_eq!(first.csv.as_bytes(), second.csv.as_bytes());
}

#[test]
fn seed_battery_keeps_identities_within_three_sigma() {
    // 20 seeds of the IBP identity on shared paths; at least 19 of 20 must
    // land inside the 3-sigma band (the binomial expectation at 3 sigma is
    // far above that).
    let config = ExperimentConfig::from_json(
        r#"{"experiment": "ibp", "paths": 20000, "steps": 100, "seed": 0}"#,
    )
    .unwrap();
    let seeds: Vec<String> = (1..=20).map(|s| (s * 1009).to_string()).collect();
    let result = runner::sweep(&config, "seed", &seeds).unwrap();
    let diffs: Vec<&pathspace_lab::report::CsvRow> = result
        .rows
        .iter()
        .filter(|r| r.component == "diff" && r.label == "bump-vs-bump")
        .collect();
    assert_eq!(diffs.len(), 20);
    let ok = diffs
        .iter()
        .filter(|r| r.verdict != Verdict::Violated)
        .count();
    assert!(ok >= 19, "only {ok}/20 seeds within 3 sigma");
}

#[test]
fn dt_sweep_of_liyau_tracks_the_oracle() {
    // Cylinder evaluations on flat models are exact in law at every step
    // size, so each run must match the oracle within noise at all three
    // sweep values.
    let config =
        ExperimentConfig::from_json(r#"{"experiment": "liyau", "paths": 20000, "seed": 23}"#)
            .unwrap();
    let result = runner::sweep(
        &config,
        "dt",
        &["0.01".into(), "0.005".into(), "0.0025".into()],
    )
    .unwrap();
    assert_ne!(result.verdict, Verdict::Violated);
    let lhs_rows: Vec<f64> = result
        .rows
        .iter()
        .filter(|r| r.component == "lhs-path")
        .map(|r| (r.estimate - 0.5).abs())
        .collect();
    assert_eq!(lhs_rows.len(), 3);
    for err in lhs_rows {
        assert!(err < 0.02, "lhs error {err}");
    }
}

#[test]
fn threshold_is_configurable_and_absurd_thresholds_flag_violations() {
    // A vanishingly small sigma multiplier turns ordinary Monte Carlo noise
    // into "violations": exit code 2 and verdicts wired through.
    let config = ExperimentConfig::from_json(
        r#"{"experiment": "ibp", "paths": 2000, "steps": 100, "seed": 5, "threshold": 1e-9}"#,
    )
    .unwrap();
    let result = runner::run(&config).unwrap();
    assert_eq!(result.exit_code, 2);
    assert_eq!(result.verdict, Verdict::Violated);
}
