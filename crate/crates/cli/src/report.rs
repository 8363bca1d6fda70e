//! Residual reports and their JSON / text forms.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// How a record's statistic is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Genuine check: max residual <= tolerance.
    Pass,
    /// Falsification control: max residual >= tolerance.
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub samples: usize,
    /// Sample points pulled towards the origin to stay clear of poles.
    pub contractions: u32,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub expect: Expectation,
    pub passed: bool,
}

impl CheckRecord {
    pub fn new(
        id: &str,
        anchor: &str,
        residuals: &[f64],
        contractions: u32,
        tolerance: f64,
        expect: Expectation,
    ) -> Self {
        let max = residuals.iter().copied().fold(0.0, f64::max);
        let mean = if residuals.is_empty() {
            0.0
        } else {
            residuals.iter().sum::<f64>() / residuals.len() as f64
        };
        let passed = !residuals.is_empty()
            && residuals.iter().all(|r| r.is_finite())
            && match expect {
                Expectation::Pass => max <= tolerance,
                Expectation::Fail => max >= tolerance,
            };
        CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            samples: residuals.len(),
            contractions,
            max_residual: max,
            mean_residual: mean,
            tolerance,
            expect,
            passed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema_version: u32,
    pub suite: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub verdict: Verdict,
    /// Only present when timing was requested; it breaks byte determinism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl ResidualReport {
    pub fn new(suite: &str, config: SuiteConfig, checks: Vec<CheckRecord>) -> Self {
        let verdict = if checks.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        ResidualReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            config,
            checks,
            verdict,
            wall_clock_seconds: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "suite {}  algebra {}  param {}  samples {}  seed {}  radius {}  fd-step {:e}",
            self.suite,
            c.algebra,
            c.parameter(),
            c.samples,
            c.seed,
            c.domain_radius,
            c.fd_step
        );
        let _ = writeln!(
            out,
            "{:<44} {:>7} {:>11} {:>11} {:>11} {:>6}  {}",
            "check", "samples", "max", "mean", "tolerance", "result", "anchor"
        );
        for r in &self.checks {
            let cmp = match r.expect {
                Expectation::Pass => "<=",
                Expectation::Fail => ">=",
            };
            let _ = writeln!(
                out,
                "{:<44} {:>7} {:>11.3e} {:>11.3e} {:>2}{:>9.1e} {:>6}  {}",
                r.id,
                r.samples,
                r.max_residual,
                r.mean_residual,
                cmp,
                r.tolerance,
                if r.passed { "pass" } else { "FAIL" },
                r.anchor
            );
        }
        let _ = writeln!(
            out,
            "verdict: {}",
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            }
        );
        if let Some(t) = self.wall_clock_seconds {
            let _ = writeln!(out, "wall clock: {t:.2} s");
        }
        out
    }
}
