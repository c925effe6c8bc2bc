//! Raw model outputs and decoded predictions, one JSON object per line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codecs::OutputFormat;
use crate::model::{EntitySpan, ParseWarning, ParsedOutput};

use super::{read_utf8, IoError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    /// Raw model output.
    pub output: String,
    /// Overrides the format given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

pub fn parse_predictions(input: &str, source_name: &str) -> Result<Vec<PredictionRecord>, IoError> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| IoError::violation(source_name, i + 1, e.to_string())))
        .collect()
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, IoError> {
    let path = path.as_ref();
    parse_predictions(&read_utf8(path)?, &path.display().to_string())
}

/// A decoded prediction as written by the `decode` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedRecord {
    pub id: String,
    pub entities: Vec<EntitySpan>,
    pub warnings: Vec<ParseWarning>,
    pub exact: bool,
}

impl DecodedRecord {
    pub fn new(id: impl Into<String>, parsed: &ParsedOutput) -> Self {
        Self {
            id: id.into(),
            entities: parsed.entities().to_vec(),
            warnings: parsed.warnings().to_vec(),
            exact: parsed.exact(),
        }
    }
}

pub fn write_decoded(records: &[DecodedRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("decoded records serialize"));
        out.push('\n');
    }
    out
}
