//! Verdicts, witnesses and their structured-text forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::linalg::Vector;

/// Witnesses kept per report, most negative margin first.
pub const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// A pair or plane with the value measured on it. `value` is a signed margin:
/// negative means the checked property is violated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(rename = "X")]
    pub x: Vec<f64>,
    #[serde(rename = "Y")]
    pub y: Vec<f64>,
    pub t: Option<f64>,
    pub value: f64,
    pub kind: String,
}

impl Witness {
    pub fn new(x: &Vector, y: &Vector, t: Option<f64>, value: f64, kind: &str) -> Self {
        Witness { x: x.iter().copied().collect(), y: y.iter().copied().collect(), t, value, kind: kind.to_string() }
    }

    pub fn x_vector(&self) -> Vector {
        Vector::from_row_slice(&self.x)
    }

    pub fn y_vector(&self) -> Vector {
        Vector::from_row_slice(&self.y)
    }
}

/// One row of the per-sample table (`delta`, `|D|`) from nonnegativity runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: u64,
    pub delta: f64,
    pub d_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub verdict: Verdict,
    pub tolerance: f64,
    pub seed: u64,
    pub samples: usize,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measurements: BTreeMap<String, f64>,
    #[serde(skip)]
    pub table: Vec<SampleRow>,
}

impl AnalysisReport {
    pub fn new(tolerance: f64, seed: u64) -> Self {
        AnalysisReport {
            verdict: Verdict::Inconclusive,
            tolerance,
            seed,
            samples: 0,
            witnesses: Vec::new(),
            measurements: BTreeMap::new(),
            table: Vec::new(),
        }
    }

    /// Keep the `MAX_WITNESSES` most negative witnesses, ties by insertion order.
    pub fn push_witness(&mut self, w: Witness) {
        self.witnesses.push(w);
        self.witnesses.sort_by(|a, b| a.value.total_cmp(&b.value));
        self.witnesses.truncate(MAX_WITNESSES);
    }

    pub fn measure(&mut self, key: &str, value: f64) {
        self.measurements.insert(key.to_string(), value);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn worst(&self) -> Option<&Witness> {
        self.witnesses.first()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV of the per-sample table.
    pub fn table_csv(&self) -> String {
        let mut out = String::from("index,delta,d_norm\n");
        for row in &self.table {
            let _ = writeln!(out, "{},{:e},{:e}", row.index, row.delta, row.d_norm);
        }
        out
    }
}
