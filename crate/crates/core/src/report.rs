//! Tabular experiment reports with reproducibility metadata, serialized to
//! canonical JSON (sorted keys) or RFC-4180 CSV. All numeric cells are
//! pre-formatted strings so both formats encode identical values.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::{QcmError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub metadata: BTreeMap<String, String>,
}

impl ExperimentReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    /// Canonical JSON: keys sorted (serde_json maps are BTree-backed), two
    /// space indentation, trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| QcmError::Domain(format!("bad report JSON: {e}")))
    }

    /// CSV with a header row; parameters and metadata are not included (they
    /// are carried by the JSON form).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("csv header");
        for row in &self.rows {
            w.write_record(row).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf8")
    }
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn fmt_ratio(r: Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
