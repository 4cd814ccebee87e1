//! Run reports shared by every subcommand.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::exit;
use crate::output::finite;

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    /// Largest observed residual or ratio (`null` when not finite).
    pub max_residual: Option<f64>,
    pub tolerance: Option<f64>,
    /// Number of individual comparisons made.
    pub checks: u64,
    pub metrics: BTreeMap<String, Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl SuiteResult {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            passed: true,
            max_residual: Some(0.0),
            tolerance: None,
            checks: 0,
            metrics: BTreeMap::new(),
            failure: None,
        }
    }

    /// Records a residual that must stay within `tol`. A NaN residual fails.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn residual(&mut self, label: &str, value: f64, tol: f64) {
        self.checks += 1;
        let current = self.max_residual.unwrap_or(f64::INFINITY);
        if !(value <= current) {
            self.max_residual = finite(value);
        }
        self.tolerance = Some(self.tolerance.map_or(tol, |t: f64| t.max(tol)));
        if !(value <= tol) {
            self.fail(format!("{label}: {value:e} exceeds {tol:e}"));
        }
    }

    /// Records a boolean condition.
    pub fn require(&mut self, label: &str, ok: bool) {
        self.checks += 1;
        if !ok {
            self.fail(label.to_string());
        }
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), finite(value));
    }

    pub fn fail(&mut self, message: String) {
        if self.passed {
            self.failure = Some(message);
        }
        self.passed = false;
    }

    /// Converts a core error raised mid-suite into a failure.
    pub fn absorb<T>(&mut self, r: vilenkin_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(e.to_string());
                None
            }
        }
    }
}

/// Machine-readable result of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub radix: Vec<usize>,
    pub radix_label: String,
    pub resolution: usize,
    pub cells: usize,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub summary: BTreeMap<String, Value>,
    pub passed: bool,
    pub exit_code: u8,
}

impl RunReport {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            radix: config.ns.radix().radices().to_vec(),
            radix_label: config.ns.radix().label(),
            resolution: config.ns.resolution(),
            cells: config.ns.size(),
            seed: config.seed,
            suites: Vec::new(),
            summary: BTreeMap::new(),
            passed: true,
            exit_code: exit::PASS,
        }
    }

    pub fn push(&mut self, suite: SuiteResult) {
        if !suite.passed {
            self.passed = false;
            self.exit_code = exit::ASSERTION;
        }
        self.suites.push(suite);
    }

    pub fn summary(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.summary.insert(key.to_string(), v);
    }

    pub fn failed_suites(&self) -> Vec<&str> {
        self.suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name.as_str())
            .collect()
    }

    /// One line per suite for the terminal.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let status = if s.passed { "PASS" } else { "FAIL" };
            let residual = s
                .max_residual
                .map_or_else(|| "non-finite".to_string(), |v| format!("{v:.3e}"));
            out.push_str(&format!("{status} {:<22} max={residual}", s.name));
            if let Some(f) = &s.failure {
                out.push_str(&format!("  ({f})"));
            }
            out.push('\n');
        }
        out
    }
}
