//! JSON-lines series records.
//!
//! One record per line:
//!
//! ```text
//! {"id": "s0", "label": "walk", "target": 0.3, "times": [0, 1], "values": [[0, 0], [1, 2]]}
//! ```
//!
//! At least one of `label` and `target` must be present. Blank lines are
//! skipped.

use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use sigreg::Path;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SeriesRecord {
    pub fn from_path(id: impl Into<String>, path: &Path) -> Self {
        SeriesRecord {
            id: id.into(),
            label: None,
            target: None,
            times: path.times().to_vec(),
            values: path.points().map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    fn to_path(&self) -> Result<Path, String> {
        if self.times.len() != self.values.len() {
            return Err(format!(
                "{} times but {} value rows",
                self.times.len(),
                self.values.len()
            ));
        }
        Path::new(self.times.clone(), self.values.clone()).map_err(|e| e.to_string())
    }
}

/// A parsed record together with its path.
#[derive(Clone, Debug)]
pub struct Series {
    pub record: SeriesRecord,
    pub path: Path,
    pub line: usize,
}

pub fn parse_records(text: &str, source: &str) -> Result<Vec<Series>, CliError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| CliError::Record {
            file: source.to_string(),
            line,
            message,
        };
        let record: SeriesRecord = serde_json::from_str(raw).map_err(|e| malformed(e.to_string()))?;
        if record.label.is_none() && record.target.is_none() {
            return Err(malformed("record has neither label nor target".into()));
        }
        let path = record.to_path().map_err(malformed)?;
        out.push(Series { record, path, line });
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{source}: no records")));
    }
    Ok(out)
}

pub fn read_records(path: &FsPath) -> Result<Vec<Series>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_records(&text, &path.display().to_string())
}

pub fn to_jsonl(records: &[SeriesRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
