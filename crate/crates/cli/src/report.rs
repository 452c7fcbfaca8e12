//! Run reports written as `report.json`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::matrix_file::MatrixFile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub source: String,
    pub label: Option<String>,
    pub dim: usize,
    pub sha256: String,
    /// `||U^H U - 1||_inf` of the matrix as read.
    pub unitarity_residual: f64,
}

impl InputSummary {
    pub fn new(file: &MatrixFile, source: &str) -> Self {
        Self {
            source: source.to_string(),
            label: file.label.clone(),
            dim: file.dim,
            sha256: file.digest(),
            unitarity_residual: numrange_core::linalg::unitarity_residual(&file.matrix()),
        }
    }
}

/// Everything a command produced, minus timing, so identical runs give
/// identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub arguments: BTreeMap<String, Value>,
    pub input: Option<InputSummary>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Value,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            arguments: BTreeMap::new(),
            input: None,
            tolerances: BTreeMap::new(),
            outputs: Value::Null,
        }
    }

    pub fn arg(mut self, name: &str, value: impl Serialize) -> Self {
        self.arguments
            .insert(name.to_string(), serde_json::to_value(value).expect("serializable argument"));
        self
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json()).with_context(|| format!("writing {}", path.display()))
    }
}
