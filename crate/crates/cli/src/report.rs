//! Report records and persistence: `report.json` plus `residuals.csv`,
//! byte-stable for a fixed seed and config up to the wall-time column.

use crate::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt;
use std::fs;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        })
    }
}

/// One check: the governing residual against its pinned tolerance, an input
/// digest, wall time, and optional reported value/detail (JSON only).
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub input_digest: String,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub command: String,
    pub seed: u64,
    pub aggregate: String,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn new(command: &str, seed: u64, checks: Vec<CheckRecord>) -> Self {
        let aggregate = if checks.iter().all(|c| c.verdict == Verdict::Pass) {
            "pass"
        } else {
            "fail"
        };
        SuiteReport {
            command: command.to_string(),
            seed,
            aggregate: aggregate.to_string(),
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.aggregate == "pass"
    }
}

/// First 16 hex chars of SHA-256 over a canonical input description.
pub fn digest(src: &str) -> String {
    let d = Sha256::digest(src.as_bytes());
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn render_json(report: &SuiteReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_csv(checks: &[CheckRecord]) -> String {
    let mut out = String::from("check,input_digest,residual,tolerance,verdict,millis\n");
    for c in checks {
        out.push_str(&format!(
            "{},{},{:?},{:?},{},{}\n",
            c.check, c.input_digest, c.residual, c.tolerance, c.verdict, c.millis
        ));
    }
    out
}

/// Write `report.json` and `residuals.csv` under `dir` (created if missing).
pub fn write_report(dir: &Path, report: &SuiteReport) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), render_json(report))?;
    fs::write(dir.join("residuals.csv"), render_csv(&report.checks))?;
    Ok(())
}
