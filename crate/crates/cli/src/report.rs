//! Verification reports in JSON and aligned text.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, Suite};
use crate::CliError;

/// Residuals are kept to this many significant digits so that reports do
/// not depend on the last bits of a floating-point sum.
const SIG_DIGITS: usize = 4;

pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Wall time of the enclosing suite. Left out of report files unless
    /// timings are requested, so reruns stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(suite: Suite, check: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let residual = round_sig(residual.abs());
        // NaN never passes
        let pass = residual <= tolerance;
        VerificationReport { suite, check: check.into(), residual, tolerance, pass, runtime_ms: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "UPPERCASE")]
pub enum SuiteStatus {
    Ran,
    Skipped { reason: String },
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    #[serde(flatten)]
    pub status: SuiteStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    pub checks: Vec<VerificationReport>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        !matches!(self.status, SuiteStatus::Error { .. }) && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped_suites: usize,
    pub errored_suites: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ScenarioConfig,
    pub suites: Vec<SuiteOutcome>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: ScenarioConfig, suites: Vec<SuiteOutcome>) -> Self {
        let checks: Vec<&VerificationReport> = suites.iter().flat_map(|s| &s.checks).collect();
        let mut failures: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.check.clone()).collect();
        for s in &suites {
            if let SuiteStatus::Error { message } = &s.status {
                failures.push(format!("{}: {message}", s.suite));
            }
        }
        let passed = checks.iter().filter(|c| c.pass).count();
        let summary = Summary {
            checks: checks.len(),
            passed,
            failed: checks.len() - passed,
            skipped_suites: suites.iter().filter(|s| matches!(s.status, SuiteStatus::Skipped { .. })).count(),
            errored_suites: suites.iter().filter(|s| matches!(s.status, SuiteStatus::Error { .. })).count(),
            failures,
        };
        Report { config, suites, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }

    /// Every check in suite order.
    pub fn checks(&self) -> impl Iterator<Item = &VerificationReport> {
        self.suites.iter().flat_map(|s| &s.checks)
    }

    /// Drops wall-clock fields.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for s in &mut r.suites {
            s.runtime_ms = None;
            for c in &mut s.checks {
                c.runtime_ms = None;
            }
        }
        r
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let width = self.checks().map(|c| c.check.chars().count()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {:<width$} {:>11} {:>9}  result", "suite", "check", "residual", "tol");
        for s in &self.suites {
            match &s.status {
                SuiteStatus::Skipped { reason } => {
                    let _ = writeln!(out, "{:<16} SKIPPED: {reason}", s.suite.name());
                }
                SuiteStatus::Error { message } => {
                    let _ = writeln!(out, "{:<16} ERROR: {message}", s.suite.name());
                }
                SuiteStatus::Ran => {}
            }
            for c in &s.checks {
                let pad = width - c.check.chars().count();
                let _ = write!(
                    out,
                    "{:<16} {}{} {:>11.3e} {:>9.0e}  {}",
                    s.suite.name(),
                    c.check,
                    " ".repeat(pad),
                    c.residual,
                    c.tolerance,
                    if c.pass { "pass" } else { "FAIL" }
                );
                if let Some(ms) = c.runtime_ms {
                    let _ = write!(out, "  {ms} ms");
                }
                out.push('\n');
            }
        }
        let m = &self.summary;
        let _ = writeln!(
            out,
            "\n{} checks, {} passed, {} failed, {} suites skipped, {} suites errored",
            m.checks, m.passed, m.failed, m.skipped_suites, m.errored_suites
        );
        for f in &m.failures {
            let _ = writeln!(out, "  failed: {f}");
        }
        out
    }

    /// Writes `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let json = dir.join("report.json");
        let txt = dir.join("report.txt");
        write_file(&json, &self.to_json())?;
        write_file(&txt, &self.to_text())?;
        Ok(vec![json, txt])
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
