use thiserror::Error;

use crate::model::{char_len, TextIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolveError {
    #[error("{mention:?} occurs {found} time(s), occurrence {requested} requested")]
    NotFound {
        mention: String,
        requested: usize,
        found: usize,
    },
    #[error("empty mention or occurrence index 0")]
    InvalidQuery,
}

/// Extents of the `k`-th (1-based) non-overlapping, left-to-right occurrence
/// of `mention` in `source_text`, in characters.
pub fn resolve_occurrence(source_text: &str, mention: &str, k: usize) -> Result<(usize, usize), ResolveError> {
    resolve_in(&TextIndex::new(source_text), mention, k)
}

pub(crate) fn resolve_in(index: &TextIndex<'_>, mention: &str, k: usize) -> Result<(usize, usize), ResolveError> {
    if mention.is_empty() || k == 0 {
        return Err(ResolveError::InvalidQuery);
    }
    let starts = index.occurrences(mention);
    match starts.get(k - 1) {
        Some(&start) => Ok((start, start + char_len(mention))),
        None => Err(ResolveError::NotFound {
            mention: mention.to_string(),
            requested: k,
            found: starts.len(),
        }),
    }
}

/// 1-based occurrence index of a mention starting at `start`, if `start` is one
/// of the non-overlapping occurrences.
pub(crate) fn occurrence_index_of(index: &TextIndex<'_>, mention: &str, start: usize) -> Option<usize> {
    index
        .occurrences(mention)
        .iter()
        .position(|&s| s == start)
        .map(|i| i + 1)
}
