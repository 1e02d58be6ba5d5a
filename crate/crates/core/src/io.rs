//! Dataset CSV ingestion, report serialization, and atomic file
//! writes.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binning::{BinningStrategy, EceReport};
use crate::cumulative::EcceReport;
use crate::error::{Error, Result};

/// Reads `score,response` pairs from a CSV file with a header row.
pub fn read_csv(path: &Path) -> Result<Vec<(f64, u8)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let display = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "score,response" => {}
        _ => {
            return Err(Error::CsvParse {
                path: display,
                line: 1,
                message: "expected header `score,response`".into(),
            })
        }
    }
    let mut pairs = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (score_str, response_str) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(Error::CsvParse {
                    path: display,
                    line: line_no,
                    message: "expected exactly two fields".into(),
                })
            }
        };
        let score: f64 = score_str.parse().map_err(|_| Error::CsvParse {
            path: display.clone(),
            line: line_no,
            message: format!("non-numeric score `{score_str}`"),
        })?;
        let response: i64 = response_str.parse().map_err(|_| Error::CsvParse {
            path: display.clone(),
            line: line_no,
            message: format!("non-numeric response `{response_str}`"),
        })?;
        if !score.is_finite() || !(0.0..=1.0).contains(&score) {
            return Err(Error::CsvParse {
                path: display,
                line: line_no,
                message: format!("score {score} is outside [0, 1]"),
            });
        }
        if response != 0 && response != 1 {
            return Err(Error::CsvParse {
                path: display,
                line: line_no,
                message: format!("response {response} is not 0 or 1"),
            });
        }
        pairs.push((score, response as u8));
    }
    Ok(pairs)
}

/// Writes pairs as CSV with scores at 17 significant digits, enough to
/// round-trip any double exactly.
pub fn write_csv(pairs: &[(f64, u8)], path: &Path) -> Result<()> {
    let mut out = String::from("score,response\n");
    for &(score, response) in pairs {
        out.push_str(&format!("{score:.16e},{response}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Writes a file via a temporary sibling and an atomic rename, so a
/// failure never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let display = path.display().to_string();
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .map_err(|source| Error::Io {
            path: display.clone(),
            source,
        })?;
    tmp.write_all(bytes).map_err(|source| Error::Io {
        path: display.clone(),
        source,
    })?;
    tmp.persist(path).map_err(|e| Error::Io {
        path: display,
        source: e.error,
    })?;
    Ok(())
}

/// One binned-error section of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EceSection {
    pub strategy: BinningStrategy,
    pub m: usize,
    pub ece1: f64,
    pub ece2: f64,
}

impl From<&EceReport> for EceSection {
    fn from(r: &EceReport) -> Self {
        EceSection {
            strategy: r.spec.strategy,
            m: r.spec.m,
            ece1: r.ece1,
            ece2: r.ece2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl Provenance {
    pub fn for_input(input: &Path, seed: Option<u64>) -> Self {
        Provenance {
            input: Some(input.display().to_string()),
            synth: None,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// The JSON report emitted by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ece_sections: Option<Vec<EceSection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ecce_section: Option<EcceReport>,
    /// Set instead of `ecce_section` when the normalization is
    /// undefined (all scores exactly 0 or 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ecce_error: Option<String>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}
