//! Behavior of the installed binary: flag parsing, artifact selection,
//! output-directory resolution, and the exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_voltlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn simulate_file(dir: &Path, name: &str, seed: u64, t: usize) -> PathBuf {
    let out = bin()
        .args([
            "simulate",
            "--t",
            &t.to_string(),
            "--seed",
            &seed.to_string(),
            "--out",
            name,
            "--out-dir",
            dir.to_str().unwrap(),
            "--format",
            "json",
        ])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "simulate failed: {out:?}");
    dir.join(name)
}

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["describe", "fit", "coint", "granger", "report", "simulate"] {
        assert!(text.contains(sub), "help does not mention {sub}");
    }
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["describe"]);
    assert_eq!(out.status.code(), Some(1), "missing --spot is a fatal error");
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1), "unknown subcommand is fatal");
}

#[test]
fn missing_input_file_exits_one_with_message() {
    let out = run(&["describe", "--spot", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error:"), "stderr was: {err}");
    assert!(err.contains("not/here.csv"), "stderr was: {err}");
}

#[test]
fn backwards_window_exits_one() {
    let dir = TempDir::new().unwrap();
    let spot = simulate_file(dir.path(), "s.csv", 1, 100);
    let out = run(&[
        "describe",
        "--spot",
        spot.to_str().unwrap(),
        "--pre",
        "2012-01-01:2010-01-01",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("window"), "stderr was: {err}");
}

#[test]
fn granger_without_futures_exits_one() {
    let dir = TempDir::new().unwrap();
    let spot = simulate_file(dir.path(), "s.csv", 2, 100);
    let out = run(&[
        "granger",
        "--spot",
        spot.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("futures"));
}

#[test]
fn out_dir_falls_back_to_env_variable() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["simulate", "--t", "60", "--seed", "5", "--format", "json"])
        .env("VOLTLAB_OUT", dir.path())
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("simulated.csv").is_file());
    assert!(dir.path().join("simulate.json").is_file());
}

#[test]
fn format_flag_controls_artifacts() {
    let dir = TempDir::new().unwrap();
    let spot = simulate_file(dir.path(), "s.csv", 3, 260);
    let span = "2004-12-01:2006-06-01";
    let base = [
        "describe",
        "--spot",
        spot.to_str().unwrap(),
        "--event-date",
        "2005-06-01",
        "--pre",
        "2004-12-01:2005-06-01",
        "--post",
        "2005-06-01:2006-06-01",
        "--full",
        span,
        "--causality",
        span,
    ];

    let json_dir = dir.path().join("json_only");
    let mut args = base.to_vec();
    args.extend(["--format", "json", "--out-dir", json_dir.to_str().unwrap()]);
    assert!(run(&args).status.success());
    assert!(json_dir.join("describe.json").is_file());
    assert!(!json_dir.join("describe.md").exists());
    assert!(fs::read_dir(&json_dir).unwrap().count() == 1, "json only");

    let md_csv_dir = dir.path().join("md_csv");
    let mut args = base.to_vec();
    args.extend(["--format", "md,csv", "--out-dir", md_csv_dir.to_str().unwrap()]);
    assert!(run(&args).status.success());
    assert!(md_csv_dir.join("describe.md").is_file());
    assert!(!md_csv_dir.join("describe.json").exists());
    assert!(md_csv_dir.join("correlogram_spot_full.csv").is_file());
    assert!(md_csv_dir.join("histogram_spot_full.csv").is_file());
}

#[test]
fn same_seed_gives_byte_identical_output() {
    let dir = TempDir::new().unwrap();
    let a = simulate_file(&dir.path().join("a"), "sim.csv", 11, 300);
    let b = simulate_file(&dir.path().join("b"), "sim.csv", 11, 300);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = simulate_file(&dir.path().join("c"), "sim.csv", 12, 300);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn failed_block_exits_two_and_names_the_block() {
    let dir = TempDir::new().unwrap();
    // 300 returns end mid-2006, so the post window below holds no prices
    // and the fit block fails without taking the process down.
    let spot = simulate_file(dir.path(), "s.csv", 4, 300);
    let out = run(&[
        "fit",
        "--spot",
        spot.to_str().unwrap(),
        "--event-date",
        "2009-01-01",
        "--pre",
        "2004-12-01:2006-01-01",
        "--post",
        "2009-01-01:2010-01-01",
        "--full",
        "2004-12-01:2010-01-01",
        "--causality",
        "2004-12-01:2010-01-01",
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("failed blocks"), "stderr was: {err}");
    assert!(err.contains("Table 5.2.3"), "stderr was: {err}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/fit.json")).unwrap())
            .unwrap();
    assert_eq!(json["blocks"][0]["status"]["state"], "failed");
}

#[test]
fn max_lag_flag_limits_scan_rows() {
    let dir = TempDir::new().unwrap();
    let spot = simulate_file(dir.path(), "s.csv", 6, 400);
    let fut = simulate_file(dir.path(), "f.csv", 7, 400);
    let out_dir = dir.path().join("g");
    let out = run(&[
        "granger",
        "--spot",
        spot.to_str().unwrap(),
        "--futures",
        fut.to_str().unwrap(),
        "--causality",
        "2004-12-01:2007-01-01",
        "--max-lag",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{out:?}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("granger.json")).unwrap()).unwrap();
    let rows = json["blocks"][0]["content"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["lag"], 1);
}
