//! CLI-layer behavior: report determinism, config validation, report shapes,
//! and the binary's exit-code contract.

use std::fs;
use std::process::Command;

use shiftlab::config::{self, ExperimentConfig};
use shiftlab::report::{render_csv, render_json, CheckRecord, SuiteReport, Verdict};
use shiftlab::runner::{self, RunContext};

fn load_str(json: &str) -> Result<ExperimentConfig, String> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, json).unwrap();
    config::load(&path).map_err(|e| e.to_string())
}

/// Zero the millis field so the comparison tests timing-free determinism.
fn masked_json(report: &SuiteReport) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&render_json(report)).unwrap();
    for c in v["checks"].as_array_mut().unwrap() {
        c["millis"] = 0.into();
    }
    v.to_string()
}

fn masked_csv(checks: &[CheckRecord]) -> String {
    render_csv(checks)
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 0 {
                line.to_string()
            } else {
                let (head, _) = line.rsplit_once(',').unwrap();
                format!("{head},0")
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn suite_deterministic_modulo_millis() {
    let ctx = RunContext::builtin(7);
    let a = SuiteReport::new("suite", 7, runner::run_suite(&ctx));
    let b = SuiteReport::new("suite", 7, runner::run_suite(&ctx));
    assert_eq!(masked_json(&a), masked_json(&b));
    assert_eq!(masked_csv(&a.checks), masked_csv(&b.checks));
}

#[test]
fn csv_header_only_for_empty_run() {
    assert_eq!(
        render_csv(&[]),
        "check,input_digest,residual,tolerance,verdict,millis\n"
    );
}

#[test]
fn config_rejects_unknown_keys_with_location() {
    let err = load_str("{\n  \"space\": \"hb\",\n  \"bogus_key\": 1\n}").unwrap_err();
    assert!(err.contains("bogus_key"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn config_complex_pairs_parse() {
    let cfg = load_str(r#"{"space":"hb","b":[[0.5,0.0],[0.25,-0.125]]}"#).unwrap();
    let b = config::to_poly(cfg.b.as_deref().unwrap());
    assert_eq!(b.coeffs()[0].re, 0.5);
    assert_eq!(b.coeffs()[1].re, 0.25);
    assert_eq!(b.coeffs()[1].im, -0.125);
}

#[test]
fn config_semantic_validation() {
    let err = load_str(r#"{"space":"model","theta_power":2,"theta_zeros":[[0.5,0.0]]}"#)
        .unwrap_err();
    assert!(err.contains("mutually exclusive"), "{err}");
    let err = load_str(r#"{"space":"model","theta_zeros":[[1.0,0.0]]}"#).unwrap_err();
    assert!(err.contains("unit disc"), "{err}");
    let err = load_str(r#"{"space":"hb","f":[]}"#).unwrap_err();
    assert!(err.contains("must not be empty"), "{err}");
}

#[test]
fn single_config_mate_yields_one_row() {
    let cfg = load_str(r#"{"space":"hb","b":[[0.5,0.0],[0.5,0.0]]}"#).unwrap();
    let ctx = RunContext {
        config: Some(cfg),
        ..RunContext::builtin(0)
    };
    let records = runner::run_mate(&ctx);
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].check, "mate/config");
    assert_eq!(records[0].verdict, Verdict::Pass);
    // mate of (1+z)/2 is (1-z)/2
    let detail = records[0].detail.as_deref().unwrap();
    assert!(detail.contains("(0.5,0.0),(-0.5,0.0)"), "{detail}");
}

#[test]
fn hb_norm_config_reports_norm_squared_six() {
    let cfg = load_str(r#"{"space":"hb","b":[[0.5,0.0],[0.5,0.0]],"f":[[0.0,0.0],[1.0,0.0]]}"#)
        .unwrap();
    let ctx = RunContext {
        config: Some(cfg),
        ..RunContext::builtin(0)
    };
    let records = runner::run_hb_norm(&ctx);
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].verdict, Verdict::Pass);
    assert!((records[0].value.unwrap() - 6.0).abs() <= 1e-8);
}

fn run_bin(args: &[&str], dir: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_shiftlab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
}

#[test]
fn exit_codes_reflect_verdicts_and_usage() {
    let dir = tempfile::tempdir().unwrap();
    let ok_cfg = dir.path().join("ok.json");
    fs::write(&ok_cfg, r#"{"space":"hb","b":[[0.5,0.0],[0.5,0.0]]}"#).unwrap();
    let out = run_bin(&["mate", "--config", ok_cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));

    // |b| > 1 on the circle: the mate check records an error verdict.
    let bad_cfg = dir.path().join("expansive.json");
    fs::write(&bad_cfg, r#"{"space":"hb","b":[[1.2,0.0]]}"#).unwrap();
    let out = run_bin(&["mate", "--config", bad_cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ERROR"));

    let unknown_cfg = dir.path().join("unknown.json");
    fs::write(&unknown_cfg, r#"{"space":"hb","mystery":3}"#).unwrap();
    let out = run_bin(&["mate", "--config", unknown_cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mystery"));

    // bergman requires a subbergman-space config
    let model_cfg = dir.path().join("model.json");
    fs::write(&model_cfg, r#"{"space":"model","theta_power":2}"#).unwrap();
    let out = run_bin(&["bergman", "--config", model_cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
