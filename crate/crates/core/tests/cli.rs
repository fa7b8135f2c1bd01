//! End-to-end tests of the `jamsec` binary: exit codes, file outputs, and
//! byte-level determinism of repeated invocations.

use std::path::Path;
use std::process::{Command, Output};

fn jamsec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jamsec"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamsec(
        &["run", "--seed", "1", "--slots", "5000", "--out", "report.json"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let line = stdout(&out);
    assert!(line.contains("mu_a="), "summary line: {line}");
    assert!(line.contains("mu_sec="));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    for key in [
        "mu_a_hat",
        "mu_sec_hat",
        "mu_sec_ci",
        "service_rate_hat",
        "state_probs",
        "eh_rate",
        "depletion_rate",
        "queue_mean",
        "battery_final",
        "arrivals_total",
        "departures_total",
    ] {
        assert!(
            report["report"].get(key).is_some(),
            "report missing field {key}"
        );
    }
    assert!(report["config"].get("lambda_a").is_some());
    assert!(report["policy"].get("alpha_e").is_some());
}

#[test]
fn missing_config_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamsec(&["run", "--config", "no_such_file.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("no_such_file.toml"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn config_file_and_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.toml"),
        "schema_version = 1\nlambda_a = 0.4\n[policy]\nalpha_e = 0.2\n",
    )
    .unwrap();
    let out = jamsec(
        &[
            "run",
            "--config",
            "cfg.toml",
            "--alpha-a",
            "0",
            "--slots",
            "4000",
            "--out",
            "r.json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["alpha_a"], 0.0);
    assert_eq!(report["config"]["lambda_a"], 0.4);
    assert_eq!(report["report"]["mu_a_hat"], 0.0);
    assert_eq!(report["report"]["mu_sec_hat"], 0.0);
}

#[test]
fn set_flag_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamsec(&["run", "--set", "bogus=1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamsec(&["run", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = jamsec(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn repeat_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run", "--seed", "9", "--slots", "8000", "--alpha-e", "0.5", "--rho", "0.3",
    ];
    let a = jamsec(&[&args[..], &["--out", "a.json"]].concat(), dir.path());
    let b = jamsec(&[&args[..], &["--out", "b.json"]].concat(), dir.path());
    assert!(a.status.success() && b.status.success());
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fig1_emits_rows_per_rate_and_mode() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "fig1",
        "--lambdas",
        "0.2,0.5",
        "--modes",
        "no_attack,attack_nosense",
        "--grid-m",
        "3",
        "--slots",
        "4000",
        "--seed",
        "4",
        "--out",
        "fig1.csv",
        "--svg",
        "fig1.svg",
    ];
    let out = jamsec(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    assert!(csv.starts_with("lambda_a,mode,mu_sec,ci\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
    let svg = std::fs::read_to_string(dir.path().join("fig1.svg")).unwrap();
    assert!(svg.contains("<polyline"));

    // Byte-identical on repeat.
    let out2 = jamsec(&args, dir.path());
    assert!(out2.status.success());
    let csv2 = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    assert_eq!(csv, csv2);
}

#[test]
fn fig1_rejects_unknown_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamsec(&["fig1", "--modes", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nonsense"));
}

#[test]
fn optimize_exports_the_full_surface() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamsec(
        &[
            "optimize", "--grid-m", "3", "--slots", "3000", "--seed", "2", "--out", "s.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("best:"));
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("rho,alpha_e,mu_sec,ci\n"));
    assert_eq!(csv.lines().count(), 1 + 9);
}

#[test]
fn validate_passes_and_prints_per_check_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamsec(&["validate", "--seed", "3"], dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"), "failures:\n{text}");
    assert!(text.contains("checks passed"));
}
