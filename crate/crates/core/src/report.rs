//! Named residual collections with tolerances and pass/fail verdicts.

use serde::Serialize;

/// One measured residual. `tolerance = None` marks a reported-only metric
/// that never participates in pass/fail decisions.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl ResidualEntry {
    pub fn asserted(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        ResidualEntry {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            pass: Some(value.is_finite() && value < tolerance),
        }
    }

    pub fn reported(name: impl Into<String>, value: f64) -> Self {
        ResidualEntry {
            name: name.into(),
            value,
            tolerance: None,
            pass: None,
        }
    }
}

/// A labelled set of residuals, serializable as part of a verification report.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub label: String,
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn new(label: impl Into<String>) -> Self {
        ResidualReport {
            label: label.into(),
            entries: Vec::new(),
        }
    }

    pub fn push_asserted(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.entries.push(ResidualEntry::asserted(name, value, tolerance));
    }

    pub fn push_reported(&mut self, name: impl Into<String>, value: f64) {
        self.entries.push(ResidualEntry::reported(name, value));
    }

    /// Largest value among asserted entries, NaN-free (NaN counts as infinite).
    pub fn max_asserted(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.tolerance.is_some())
            .map(|e| if e.value.is_nan() { f64::INFINITY } else { e.value })
            .fold(0.0, f64::max)
    }

    pub fn all_asserted_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass.unwrap_or(true))
    }

    pub fn get(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Names of asserted entries that failed.
    pub fn failures(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.pass == Some(false))
            .map(|e| e.name.as_str())
            .collect()
    }
}
