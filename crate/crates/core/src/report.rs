//! Verification report rows shared by the check suites and the CLI.

use serde::{Deserialize, Serialize};

/// One per-sample verification row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub sample: usize,
    /// complex values stored as `[re, im]`
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub residual: f64,
    pub verdict: bool,
}

/// One check with its rows, summary residuals and verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub tolerance: f64,
    pub rows: Vec<CheckRow>,
    pub max_residual: f64,
    pub median_residual: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn from_rows(check: impl Into<String>, tolerance: f64, rows: Vec<CheckRow>) -> Self {
        let mut residuals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
        residuals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let max_residual = residuals.last().copied().unwrap_or(0.0);
        let median_residual = if residuals.is_empty() {
            0.0
        } else {
            residuals[residuals.len() / 2]
        };
        let passed = rows.iter().all(|r| r.verdict);
        CheckReport {
            check: check.into(),
            tolerance,
            rows,
            max_residual,
            median_residual,
            passed,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

pub(crate) fn complex_pair(c: num_complex::Complex64) -> [f64; 2] {
    [c.re, c.im]
}
