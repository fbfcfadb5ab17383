//! End-to-end checks of the binary: exit codes and byte-level determinism.

use std::path::Path;
use std::process::Command;

fn linbet() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linbet"))
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn reproduce_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        // small reps keep this under test-suite budgets; determinism is
        // independent of scale
        let status = linbet()
            .args([
                "reproduce",
                "--dataset",
                "s3",
                "--seed",
                "42",
                "--reps",
                "3",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["s3_tofu_runs.csv", "s3_crt_runs.csv", "s3_aggregate.csv"] {
        assert_eq!(
            read(&out_a.join(file)),
            read(&out_b.join(file)),
            "{file} differs between identical invocations"
        );
    }
    assert!(out_a.join("manifest.json").exists());
    assert!(out_a.join("s3_cum_payoff.svg").exists());
}

#[test]
fn jobs_flag_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("j1");
    let out_b = dir.path().join("j4");
    for (out, jobs) in [(&out_a, "1"), (&out_b, "4")] {
        let status = linbet()
            .args([
                "run", "--dataset", "s1", "--algo", "mom", "-T", "2000", "--reps", "4",
                "--seed", "7", "--no-plot", "--jobs", jobs, "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(read(&out_a.join("runs.csv")), read(&out_b.join("runs.csv")));
}

#[test]
fn unknown_dataset_exits_2() {
    let out = tempfile::tempdir().unwrap();
    let status = linbet()
        .args(["run", "--dataset", "s9", "--algo", "menu", "--out"])
        .arg(out.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn menu_below_min_horizon_exits_2() {
    let out = tempfile::tempdir().unwrap();
    let status = linbet()
        .args(["run", "--dataset", "s1", "--algo", "menu", "-T", "100", "--out"])
        .arg(out.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn validate_suites_pass() {
    let status = linbet()
        .args(["validate", "--suite", "weights"])
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn unknown_validate_suite_exits_2() {
    let status = linbet()
        .args(["validate", "--suite", "bogus"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn plot_round_trip_from_exported_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = linbet()
        .args([
            "run", "--dataset", "s1", "--algo", "crt", "--moment-bound", "25", "-T", "500",
            "--reps", "2", "--seed", "1", "--no-plot", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let svg = dir.path().join("replot.svg");
    let status = linbet()
        .args(["plot", "--metric", "regret", "--input"])
        .arg(out.join("aggregate.csv"))
        .arg("--out")
        .arg(&svg)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
}

#[test]
fn scaling_outputs_slope_json() {
    let output = linbet()
        .args([
            "scaling", "--dataset", "s1", "--algo", "mom", "--horizons", "400", "800",
            "1600", "3200", "--reps", "2", "--seed", "5",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(json["slope"].is_number());
    assert_eq!(json["points"].as_array().unwrap().len(), 4);
}

#[test]
fn lowerbound_reports_floor_comparison() {
    let output = linbet()
        .args([
            "lowerbound", "-d", "2", "--epsilon", "1.0", "-T", "2000", "--reps", "2",
            "--algo", "mom", "--seed", "3",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(json["floor"].is_number());
    assert!(json["mean_final_regret"].is_number());
}
