//! Process-level behavior of the `vilenkin` binary.

use std::path::Path;
use std::process::{Command, Output};

fn vilenkin(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vilenkin"));
    cmd.args(args);
    for key in [
        "VILENKIN_CONFIG",
        "VILENKIN_OUT",
        "VILENKIN_SEED",
        "VILENKIN_SUITES",
        "VILENKIN_MAX_CELLS",
    ] {
        cmd.env_remove(key);
    }
    cmd.envs(envs.iter().copied());
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "radix": [2, 3, 2]}"#,
    );
    let out = dir.path().join("out");
    let o = vilenkin(
        &[
            "verify",
            "--config",
            &config,
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("PASS ")).count(),
        12
    );
    assert!(out.join("verify_report.json").exists());
}

#[test]
fn corrupted_weight_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "radix": [2, 2, 2, 2], "fault": {"cesaro_weight_factor": 1.01}}"#,
    );
    let out = dir.path().join("out");
    let o = vilenkin(
        &[
            "verify",
            "--config",
            &config,
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verify_report.json")).unwrap())
            .unwrap();
    let failed: Vec<&str> = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["passed"] == false)
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["cesaro_kernel"]);
}

#[test]
fn configuration_problems_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let cases = [
        r#"{"schema_version": 1, "radix": [2, 1, 2]}"#,
        r#"{"schema_version": 2, "radix": [2, 2]}"#,
        r#"{"schema_version": 1, "radix": [2, 2], "alphas": [1.5]}"#,
        r#"{"schema_version": 1, "radix": [2, 2], "unknown_key": true}"#,
        r#"{"schema_version": 1, "radix": {"constant": 2, "length": 30}}"#,
        "not json",
    ];
    for (i, body) in cases.iter().enumerate() {
        let config = write(dir.path(), &format!("bad{i}.json"), body);
        let o = vilenkin(&["verify", "--config", &config, "--out", out], &[]);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{body}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let missing = dir.path().join("missing.json");
    let o = vilenkin(
        &[
            "verify",
            "--config",
            missing.to_str().unwrap(),
            "--out",
            out,
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    let good = write(
        dir.path(),
        "good.json",
        r#"{"schema_version": 1, "radix": [2, 2]}"#,
    );
    let o = vilenkin(
        &[
            "verify",
            "--config",
            &good,
            "--out",
            out,
            "--suites",
            "no_such_suite",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = vilenkin(
        &[
            "verify",
            "--config",
            &good,
            "--out",
            out,
            "--max-cells",
            "2",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = vilenkin(&["no-such-command"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn environment_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "radix": [2, 3, 2]}"#,
    );
    let out = dir.path().join("env_out");
    let o = vilenkin(
        &["verify"],
        &[
            ("VILENKIN_CONFIG", config.as_str()),
            ("VILENKIN_OUT", out.to_str().unwrap()),
            ("VILENKIN_SEED", "99"),
            ("VILENKIN_SUITES", "binomials,lemma1"),
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verify_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["seed"], 99);
    let names: Vec<&str> = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["binomials", "lemma1"]);
}

#[test]
fn every_command_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "radix": [2, 3, 2, 2], "limits": {"combination_draws": 5, "bench_repeats": 1}}"#,
    );
    for (command, files) in [
        ("converge", &["converge.csv", "converge_summary.json"][..]),
        (
            "kernel-scan",
            &["kernel_scan.csv", "kernel_scan_summary.json"],
        ),
        (
            "oscillation",
            &["oscillation.csv", "oscillation_summary.json"],
        ),
        ("bench", &["bench.json"]),
    ] {
        let out = dir.path().join(command);
        let o = vilenkin(
            &[command, "--config", &config, "--out", out.to_str().unwrap()],
            &[],
        );
        assert_eq!(
            o.status.code(),
            Some(0),
            "{command}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
        for f in files {
            assert!(out.join(f).exists(), "{command} wrote no {f}");
        }
    }
}
