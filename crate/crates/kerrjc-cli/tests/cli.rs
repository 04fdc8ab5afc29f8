//! End-to-end tests of the `kerrjc` binary: exit codes, golden-file
//! determinism, the JSON summary echo, and config precedence.

use std::fs;
use std::process::{Command, Output};

fn kerrjc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrjc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn kerrjc_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrjc"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

#[test]
fn serial_reruns_are_bitwise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec![
            "decoherence".to_string(),
            "--g".into(),
            "0.2".into(),
            "--chi".into(),
            "0.02".into(),
            "--dim".into(),
            "32".into(),
            "--t-steps".into(),
            "64".into(),
            "--methods".into(),
            "numeric,rederived-series".into(),
            "--serial".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    for path in [&path_a, &path_b] {
        let argv = args(path);
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        let out = kerrjc(&refs);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = fs::read(&path_a).unwrap();
    let b = fs::read(&path_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn csv_has_expected_header_and_lf_endings() {
    let out = kerrjc(&["transfer", "--t-steps", "16", "--dim", "16", "--serial"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,P_analytic,P_oracle\n"));
    assert_eq!(text.lines().count(), 17);
    assert!(!text.contains('\r'));
}

#[test]
fn json_summary_echo_reproduces_csv() {
    let out = kerrjc(&[
        "revival",
        "--g",
        "0.3",
        "--t-steps",
        "32",
        "--dim",
        "16",
        "--format",
        "json",
        "--serial",
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["results"]["tau_1"].is_number());
    assert!(summary["wall_time_s"].is_number());
    let spec = &summary["spec"];
    assert_eq!(spec["command"], "revival");
    assert_eq!(spec["t-steps"].as_u64(), None); // serde field name is t_steps
    assert_eq!(spec["t_steps"].as_u64(), Some(32));

    // Re-running with the echoed scalar knobs reproduces the curves.
    let first = kerrjc(&[
        "revival",
        "--g",
        "0.3",
        "--t-steps",
        "32",
        "--dim",
        "16",
        "--serial",
    ]);
    let second = kerrjc(&[
        "revival",
        "--g",
        "0.3",
        "--t-steps",
        "32",
        "--dim",
        "16",
        "--serial",
    ]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn spec_validation_exits_2() {
    let out = kerrjc(&["transfer", "--t-steps", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kerrjc(&["transfer", "--alpha-re", "1.0", "--beta-re", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kerrjc(&["transfer", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kerrjc(&["decoherence", "--methods", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_failure_exits_3() {
    // lambda = 1.5 needs dim > 9; dim 8 passes spec validation but fails
    // the displacement headroom.
    let out = kerrjc(&[
        "decoherence",
        "--g",
        "1.5",
        "--chi",
        "0",
        "--dim",
        "8",
        "--t-steps",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("truncation"), "{err}");
}

#[test]
fn unknown_flag_exits_2_and_help_exits_0() {
    let out = kerrjc(&["transfer", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kerrjc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_file_applies_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        "# sweep setup\n\
         g = 0.2\n\
         t-steps = 8\n\
         dim = 16\n\
         format = json\n",
    )
    .unwrap();
    let cfg = config.display().to_string();

    let out = kerrjc(&["transfer", "--config", &cfg, "--serial"]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["spec"]["t_steps"].as_u64(), Some(8));
    assert_eq!(summary["spec"]["params"]["g"].as_f64(), Some(0.2));

    // Flag beats config.
    let out = kerrjc(&["transfer", "--config", &cfg, "--t-steps", "12", "--serial"]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["spec"]["t_steps"].as_u64(), Some(12));

    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "nonsense-key = 1\n").unwrap();
    let out = kerrjc(&["transfer", "--config", &bad.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_env_forces_serial_and_rejects_garbage() {
    let out = kerrjc_with_env(
        &[
            "transfer",
            "--t-steps",
            "16",
            "--dim",
            "16",
            "--format",
            "json",
        ],
        "KERRJC_THREADS",
        "1",
    );
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["spec"]["serial"], serde_json::Value::Bool(true));

    let out = kerrjc_with_env(&["transfer"], "KERRJC_THREADS", "zero");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_reports_defect_warning() {
    let out = kerrjc(&[
        "audit",
        "--g",
        "0.2",
        "--chi",
        "0.02",
        "--dim",
        "32",
        "--t-steps",
        "32",
        "--format",
        "json",
        "--serial",
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let warnings = summary["warnings"].as_array().unwrap();
    assert!(warnings
        .iter()
        .any(|w| w.as_str().unwrap().starts_with("D0_defect")));
    assert!(
        summary["results"]["max_abs_diff_printed_series_vs_numeric"]
            .as_f64()
            .unwrap()
            > 1e-3
    );
    assert!(
        summary["results"]["max_abs_diff_rederived_series_vs_numeric"]
            .as_f64()
            .unwrap()
            < 1e-8
    );
}

#[test]
fn convergence_command_tabulates_dims() {
    let out = kerrjc(&[
        "convergence",
        "--g",
        "0.2",
        "--chi",
        "0.02",
        "--dims",
        "16,32,64",
        "--t-steps",
        "8",
        "--serial",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("dim,value\n"));
    assert_eq!(text.lines().count(), 4);
}
