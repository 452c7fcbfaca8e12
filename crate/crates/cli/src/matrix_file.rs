//! JSON matrix files: `{"dim": n, "entries": [[re, im], ...], "label": ..., "source": ...}`
//! with entries in row-major order.

use std::fmt;
use std::path::Path;

use anyhow::Context;
use num_complex::Complex64;
use numrange_core::linalg::ComplexMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Malformed matrix file. `line` and `column` are 1-based and present
/// for syntax and type errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub origin: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{}:{l}:{c}: {}", self.origin, self.message),
            _ => write!(f, "{}: {}", self.origin, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, label: Option<String>, source: Option<String>) -> Self {
        Self {
            dim: m.dim(),
            entries: m.row_major().iter().map(|z| [z.re, z.im]).collect(),
            label,
            source,
        }
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ParseError> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| ParseError {
            origin: origin.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
            message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
        })?;
        file.validate(origin)?;
        Ok(file)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Self::parse(&text, &path.display().to_string())?)
    }

    fn validate(&self, origin: &str) -> Result<(), ParseError> {
        let fail = |message: String| ParseError {
            origin: origin.to_string(),
            line: None,
            column: None,
            message,
        };
        if self.dim == 0 {
            return Err(fail("dim must be positive".into()));
        }
        if self.entries.len() != self.dim * self.dim {
            return Err(fail(format!(
                "expected {} entries for dim {}, found {}",
                self.dim * self.dim,
                self.dim,
                self.entries.len()
            )));
        }
        if let Some(k) = self.entries.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(fail(format!("entry {k} (row {}, column {}) is not finite", k / self.dim, k % self.dim)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json()).with_context(|| format!("writing {}", path.display()))
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let entries: Vec<Complex64> = self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::from_row_slice(self.dim, &entries).expect("validated on construction")
    }

    /// SHA-256 over the dimension and the raw little-endian entry bits, so
    /// formatting and metadata do not change it.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        for [re, im] in &self.entries {
            h.update(re.to_le_bytes());
            h.update(im.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_line_and_column() {
        let err = MatrixFile::parse("{\n  \"dim\": 2,\n  \"entries\": [[1, 0], oops]\n}", "m.json").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.column.is_some());
        assert!(err.to_string().starts_with("m.json:3:"));
    }

    #[test]
    fn rejects_wrong_length_and_zero_dim() {
        let err = MatrixFile::parse(r#"{"dim": 2, "entries": [[1, 0]]}"#, "m").unwrap_err();
        assert!(err.message.contains("expected 4 entries"));
        assert!(MatrixFile::parse(r#"{"dim": 0, "entries": []}"#, "m").is_err());
        assert!(MatrixFile::parse(r#"{"dim": 1, "entries": [[1, 0]], "extra": 1}"#, "m").is_err());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let vals = [0.1, -1.0 / 3.0, std::f64::consts::PI, 1e-300, -0.0, 123456.789e10, f64::MIN_POSITIVE, 0.3];
        let file = MatrixFile {
            dim: 2,
            entries: vec![[vals[0], vals[1]], [vals[2], vals[3]], [vals[4], vals[5]], [vals[6], vals[7]]],
            label: Some("x".into()),
            source: None,
        };
        let back = MatrixFile::parse(&file.to_json(), "mem").unwrap();
        for (a, b) in file.entries.iter().zip(&back.entries) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
        assert_eq!(file.digest(), back.digest());
        assert_eq!(file.digest().len(), 64);
    }
}
