//! Pass/fail rows for statistical comparisons.

use serde::{Deserialize, Serialize};

use super::config::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n_a: usize,
    pub n_b: usize,
    pub stderr_a: f64,
    pub stderr_b: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl StatRow {
    /// |a − b| against k·√(σ_a² + σ_b²) + tol.
    pub fn difference(name: impl Into<String>, a: (f64, f64, usize), b: (f64, f64, usize), k: f64, tol: f64) -> Self {
        let statistic = (a.0 - b.0).abs();
        let threshold = k * a.1.hypot(b.1) + tol;
        StatRow {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic <= threshold,
            n_a: a.2,
            n_b: b.2,
            stderr_a: a.1,
            stderr_b: b.1,
            detail: format!("a = {}, b = {}", a.0, b.0),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub schema_version: u32,
    pub rows: Vec<StatRow>,
}

impl Default for StatReport {
    fn default() -> Self {
        StatReport {
            schema_version: SCHEMA_VERSION,
            rows: Vec::new(),
        }
    }
}

impl StatReport {
    pub fn push(&mut self, row: StatRow) {
        self.rows.push(row);
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}
