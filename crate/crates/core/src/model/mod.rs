//! Span data model shared by every codec, scorer and report.

mod nesting;
mod schema;
mod text;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use nesting::{flatten_forest, is_nested, laminar_check, nesting_forest, nesting_forest_by, NestingNode};
pub use schema::{is_valid_label_id, LabelDef, LabelSchema, BUILTIN_SCHEMAS, SCHEMA_FORMAT_VERSION};
pub use text::{char_len, TextIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("span ({start}, {end}) is invalid for a text of {len} characters")]
    InvalidSpan { start: usize, end: usize, len: usize },
    #[error("duplicate span ({start}, {end}, {label})")]
    DuplicateSpan { start: usize, end: usize, label: String },
    #[error("invalid label id {0:?}")]
    InvalidLabel(String),
    #[error("duplicate label id {0:?}")]
    DuplicateLabel(String),
    #[error("a label schema needs at least one label")]
    EmptySchema,
    #[error("malformed schema: {0}")]
    SchemaFormat(String),
    #[error("spans ({0}) and ({1}) partially overlap")]
    NotLaminar(EntitySpan, EntitySpan),
}

/// One labeled mention, as half-open character offsets into its sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

impl EntitySpan {
    pub fn new(start: usize, end: usize, label: impl Into<String>) -> Self {
        Self {
            start,
            end,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `0 <= start < end <= text_len`.
    pub fn is_valid_for(&self, text_len: usize) -> bool {
        self.start < self.end && self.end <= text_len
    }

    pub fn same_extent(&self, other: &EntitySpan) -> bool {
        self.start == other.start && self.end == other.end
    }

    /// `self` covers `other` (equal extents count).
    pub fn contains(&self, other: &EntitySpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlap(&self, other: &EntitySpan) -> usize {
        self.end.min(other.end).saturating_sub(self.start.max(other.start))
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.overlap(other) > 0
    }

    /// Order used for serialization: by start, longer spans first, then label.
    pub fn canonical_cmp(&self, other: &EntitySpan) -> Ordering {
        self.start
            .cmp(&other.start)
            .then(other.end.cmp(&self.end))
            .then_with(|| self.label.cmp(&other.label))
    }
}

impl fmt::Display for EntitySpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{} {}", self.start, self.end, self.label)
    }
}

/// Source text plus its gold (or predicted) spans.
///
/// Construction validates every span against the text and rejects duplicate
/// `(start, end, label)` triples; entities are kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    id: String,
    text: String,
    entities: Vec<EntitySpan>,
}

impl AnnotatedSentence {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        mut entities: Vec<EntitySpan>,
    ) -> Result<Self, ModelError> {
        let text = text.into();
        let len = char_len(&text);
        for span in &entities {
            if !span.is_valid_for(len) {
                return Err(ModelError::InvalidSpan {
                    start: span.start,
                    end: span.end,
                    len,
                });
            }
            schema::validate_label_id(&span.label)?;
        }
        entities.sort_by(EntitySpan::canonical_cmp);
        if let Some(w) = entities.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateSpan {
                start: w[0].start,
                end: w[0].end,
                label: w[0].label.clone(),
            });
        }
        Ok(Self {
            id: id.into(),
            text,
            entities,
        })
    }

    /// Like [`AnnotatedSentence::new`] but collapses duplicate triples instead
    /// of rejecting them. Returns how many were dropped.
    pub fn new_dedup(
        id: impl Into<String>,
        text: impl Into<String>,
        mut entities: Vec<EntitySpan>,
    ) -> Result<(Self, usize), ModelError> {
        let before = entities.len();
        entities.sort();
        entities.dedup();
        let dropped = before - entities.len();
        Ok((Self::new(id, text, entities)?, dropped))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn entities(&self) -> &[EntitySpan] {
        &self.entities
    }

    pub fn char_len(&self) -> usize {
        char_len(&self.text)
    }

    /// The text a span covers.
    pub fn mention(&self, span: &EntitySpan) -> Option<&str> {
        TextIndex::new(&self.text).slice(span.start, span.end)
    }

    /// Same text and id, different entities.
    pub fn with_entities(&self, entities: Vec<EntitySpan>) -> Result<Self, ModelError> {
        Self::new(self.id.clone(), self.text.clone(), entities)
    }
}

/// Machine-readable reason attached to every recovery action a decoder takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WarningCode {
    /// Bracket or tag without a partner.
    UnbalancedMarkup,
    /// Close tag that does not match the innermost open tag.
    MismatchedTag,
    UnknownLabel,
    EmptyMention,
    /// Stripped output differed from the source only in whitespace.
    AlignmentRepaired,
    /// Stripped output could not be aligned; spans were resolved by occurrence.
    AlignmentFailed,
    MentionNotFound,
    OccurrenceOutOfRange,
    InvalidOccurrenceIndex,
    InvalidOffsets,
    OffsetTextMismatch,
    MalformedRecord,
    JsonRepaired,
    ParseFailure,
    DuplicateSpan,
    UnknownSymbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub code: WarningCode,
    pub message: String,
    /// The raw piece of model output the warning is about.
    pub fragment: String,
    /// Label the fragment was tagged with, when there was one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ParseWarning {
    pub fn new(code: WarningCode, message: impl Into<String>, fragment: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            fragment: fragment.into(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// Spans recovered from one model output. `exact()` holds iff no recovery
/// action was needed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedOutput {
    entities: Vec<EntitySpan>,
    warnings: Vec<ParseWarning>,
}

impl ParsedOutput {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an output directly. Entities are sorted canonically; duplicates
    /// are kept (a prediction is a multiset).
    pub fn from_parts(mut entities: Vec<EntitySpan>, warnings: Vec<ParseWarning>) -> Self {
        entities.sort_by(EntitySpan::canonical_cmp);
        Self { entities, warnings }
    }

    pub fn entities(&self) -> &[EntitySpan] {
        &self.entities
    }

    pub fn warnings(&self) -> &[ParseWarning] {
        &self.warnings
    }

    pub fn exact(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn push_entity(&mut self, span: EntitySpan) {
        self.entities.push(span);
    }

    pub fn warn(&mut self, warning: ParseWarning) {
        self.warnings.push(warning);
    }

    pub(crate) fn finish(mut self) -> Self {
        self.entities.sort_by(EntitySpan::canonical_cmp);
        let dups: Vec<EntitySpan> = self
            .entities
            .windows(2)
            .filter(|w| w[0] == w[1])
            .map(|w| w[1].clone())
            .collect();
        for d in dups {
            self.warnings.push(
                ParseWarning::new(
                    WarningCode::DuplicateSpan,
                    "span predicted more than once",
                    d.to_string(),
                )
                .with_label(d.label.clone()),
            );
        }
        self
    }

    pub fn into_parts(self) -> (Vec<EntitySpan>, Vec<ParseWarning>) {
        (self.entities, self.warnings)
    }
}

impl Serialize for ParsedOutput {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ParsedOutput", 3)?;
        s.serialize_field("entities", &self.entities)?;
        s.serialize_field("warnings", &self.warnings)?;
        s.serialize_field("exact", &self.exact())?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentence_validates_spans() {
        let ok = AnnotatedSentence::new("1", "Havel praises", vec![EntitySpan::new(0, 5, "PER")]).unwrap();
        assert_eq!(ok.mention(&ok.entities()[0]), Some("Havel"));
        assert!(matches!(
            AnnotatedSentence::new("1", "Havel", vec![EntitySpan::new(0, 6, "PER")]),
            Err(ModelError::InvalidSpan { .. })
        ));
        assert!(AnnotatedSentence::new("1", "Havel", vec![EntitySpan::new(3, 3, "PER")]).is_err());
        assert!(matches!(
            AnnotatedSentence::new(
                "1",
                "Havel",
                vec![EntitySpan::new(0, 5, "PER"), EntitySpan::new(0, 5, "PER")]
            ),
            Err(ModelError::DuplicateSpan { .. })
        ));
    }

    #[test]
    fn same_extent_different_label_is_allowed() {
        let s = AnnotatedSentence::new(
            "1",
            "Paris",
            vec![EntitySpan::new(0, 5, "LOC"), EntitySpan::new(0, 5, "GPE")],
        )
        .unwrap();
        assert_eq!(s.entities().len(), 2);
    }

    #[test]
    fn dedup_reports_collapsed_count() {
        let (s, dropped) = AnnotatedSentence::new_dedup(
            "1",
            "ab",
            vec![
                EntitySpan::new(0, 1, "X"),
                EntitySpan::new(0, 1, "X"),
                EntitySpan::new(1, 2, "X"),
            ],
        )
        .unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(s.entities().len(), 2);
    }

    #[test]
    fn exact_iff_no_warnings() {
        let mut p = ParsedOutput::new();
        assert!(p.exact());
        p.warn(ParseWarning::new(WarningCode::ParseFailure, "x", ""));
        assert!(!p.exact());
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["exact"], false);
    }

    #[test]
    fn finish_flags_duplicates_but_keeps_them() {
        let mut p = ParsedOutput::new();
        p.push_entity(EntitySpan::new(0, 1, "X"));
        p.push_entity(EntitySpan::new(0, 1, "X"));
        let p = p.finish();
        assert_eq!(p.entities().len(), 2);
        assert_eq!(p.warnings()[0].code, WarningCode::DuplicateSpan);
    }
}
