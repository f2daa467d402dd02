//! The JSON verification report.

use aqft1d::report::CheckReport;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub check: String,
    pub status: &'static str,
    /// `null` when the check could not produce a finite error.
    pub max_error: Option<f64>,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckEntry {
    pub fn new(r: &CheckReport, runtime_ms: Option<u64>) -> Self {
        Self {
            check: r.check.clone(),
            status: r.status(),
            max_error: r.max_error.is_finite().then_some(r.max_error),
            tolerance: r.tolerance,
            samples: r.samples,
            runtime_ms,
            error: r.error.clone(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub artifact: &'static str,
    pub version: &'static str,
    pub passed: bool,
    pub config: RunConfig,
    /// Sorted by check name.
    pub checks: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new(config: RunConfig, mut checks: Vec<CheckEntry>) -> Self {
        checks.sort_by(|a, b| a.check.cmp(&b.check));
        let passed = checks.iter().all(CheckEntry::passed);
        Self { artifact: "aqft1d", version: env!("CARGO_PKG_VERSION"), passed, config, checks }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let err = c.max_error.map_or("-".to_string(), |e| format!("{e:.3e}"));
            out.push_str(&format!("{:<5} {:<55} {:>10} <= {:.1e}\n", c.status, c.check, err, c.tolerance));
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}
