use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::stats::Estimate;

/// Version of the JSON report and CSV table layout.
pub const REPORT_SCHEMA: u32 = 1;

/// A numeric table, written as one CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    /// Header row then one line per row; floats use shortest round-trip
    /// formatting.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// One pass/fail verdict against a declared tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable criterion, e.g. `"< 0.03"`.
    pub criterion: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, criterion: impl Into<String>, passed: bool) -> Self {
        Self { name: name.into(), value, criterion: criterion.into(), passed }
    }

    pub fn below(name: &str, value: f64, max: f64) -> Self {
        Self::new(name, value, format!("< {max}"), value < max)
    }

    pub fn at_least(name: &str, value: f64, min: f64) -> Self {
        Self::new(name, value, format!(">= {min}"), value >= min)
    }
}

/// Outcome of a campaign. Contains no timing or thread information, so
/// it is a pure function of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub schema: u32,
    pub suite: String,
    pub weight: String,
    pub seed: u64,
    /// Replicas per ladder point.
    pub replicas: u64,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl StatsReport {
    pub fn new(suite: &str, weight: String, seed: u64, replicas: u64) -> Self {
        Self { schema: REPORT_SCHEMA, suite: suite.into(), weight, seed, replicas, tables: Vec::new(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` and one `<table>.csv` per table into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join("report.json");
        std::fs::write(&json, self.to_json())?;
        written.push(json);
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            std::fs::write(&path, t.to_csv())?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `[value, se, n]` for table rows.
pub(crate) fn cells(e: Estimate) -> [f64; 3] {
    [e.value, e.se, e.n as f64]
}
