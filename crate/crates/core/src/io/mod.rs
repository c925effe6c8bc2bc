//! Corpus readers and writers, prediction files and corpus statistics.

mod conll;
mod predictions;
mod standoff;
mod stats;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use conll::{parse_conll, read_conll_columns, write_conll_columns, ConllCorpus};
pub use predictions::{parse_predictions, read_predictions, write_decoded, DecodedRecord, PredictionRecord};
pub use standoff::{parse_standoff, read_standoff_json, write_standoff, StandoffCorpus};
pub use stats::{corpus_stats, shared_extent_pairs, CorpusStats};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: file is not valid UTF-8")]
    Encoding { path: PathBuf },
    #[error("{source_name}:{line}: {message}")]
    SchemaViolation {
        source_name: String,
        line: usize,
        message: String,
    },
}

impl IoError {
    pub(crate) fn violation(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        IoError::SchemaViolation {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}

/// A recoverable problem found while reading a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IoWarning {
    pub line: usize,
    pub message: String,
}

pub(crate) fn read_utf8(path: &Path) -> Result<String, IoError> {
    let bytes = fs::read(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|_| IoError::Encoding {
        path: path.to_path_buf(),
    })
}
