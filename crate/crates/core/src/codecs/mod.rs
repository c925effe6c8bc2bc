//! Serialization and parsing of the five generative output formats.
//!
//! | format            | example                                                   |
//! |-------------------|-----------------------------------------------------------|
//! | `inline-bracketed`| `... with [PU.1 \| Protein] on a ...`                     |
//! | `inline-xml`      | `... with <Protein>PU.1</Protein> on a ...`               |
//! | `category-json`   | `{"DNA": ["myeloid PU.1 binding site"], "Protein": [...]}`|
//! | `occurrence-json` | `[{"text": "PU.1", "label": "Protein", "occurrence_index": 1}]` |
//! | `offset-json`     | `[{"text": "PU.1", "label": "Protein", "start": 63, "end": 67}]` |
//!
//! Encoders are strict and return [`EncodeError`]. Decoders are total: they
//! accept arbitrary model output and report every recovery action as a
//! [`ParseWarning`](crate::model::ParseWarning) in the returned
//! [`ParsedOutput`].

mod align;
mod category;
mod escape;
mod inline_bracketed;
mod inline_xml;
mod json;
mod occurrence;
mod offset;
mod resolve;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    is_valid_label_id, nesting_forest_by, AnnotatedSentence, EntitySpan, LabelSchema, ModelError, NestingNode,
    ParseWarning, ParsedOutput, TextIndex, WarningCode,
};

pub use category::{category_mentions, decode_category_json, encode_category_json};
pub use escape::{escape_inline, unescape_inline};
pub use inline_bracketed::{decode_inline_bracketed, encode_inline_bracketed};
pub use inline_xml::{decode_inline_xml, encode_inline_xml};
pub use json::{parse_json_lenient, LenientJson};
pub use occurrence::{decode_occurrence_json, encode_occurrence_json, OccurrenceRecord};
pub use offset::{decode_offset_json, encode_offset_json, OffsetRecord};
pub use resolve::{resolve_occurrence, ResolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    InlineBracketed,
    InlineXml,
    CategoryJson,
    OccurrenceJson,
    OffsetJson,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 5] = [
        OutputFormat::InlineBracketed,
        OutputFormat::InlineXml,
        OutputFormat::CategoryJson,
        OutputFormat::OccurrenceJson,
        OutputFormat::OffsetJson,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::InlineBracketed => "inline-bracketed",
            OutputFormat::InlineXml => "inline-xml",
            OutputFormat::CategoryJson => "category-json",
            OutputFormat::OccurrenceJson => "occurrence-json",
            OutputFormat::OffsetJson => "offset-json",
        }
    }

    /// Inline formats embed markup in the sentence and need a laminar family.
    pub fn is_inline(self) -> bool {
        matches!(self, OutputFormat::InlineBracketed | OutputFormat::InlineXml)
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown output format {0:?} (expected one of inline-bracketed, inline-xml, category-json, occurrence-json, offset-json)")]
pub struct UnknownFormat(pub String);

impl FromStr for OutputFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutputFormat::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| UnknownFormat(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("spans ({0}) and ({1}) partially overlap and cannot be written inline")]
    NotLaminar(EntitySpan, EntitySpan),
    #[error("label {0:?} is not in the schema")]
    UnknownLabel(String),
    #[error("span ({0}) does not start at a non-overlapping occurrence of its text")]
    UnrepresentablePosition(EntitySpan),
}

/// How offset-json records whose offsets disagree with their text are handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffsetMode {
    /// Drop the record.
    #[default]
    Strict,
    /// Re-resolve the record by searching for its text.
    Lenient,
}

/// Whether decoders may emit labels outside the schema.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelPolicy {
    /// Out-of-schema labels are reported and the fragment is skipped.
    #[default]
    SchemaClosed,
    /// Out-of-schema labels are reported but kept. Only useful for error
    /// analysis of raw model output.
    PassThrough,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    pub offset_mode: OffsetMode,
    pub label_policy: LabelPolicy,
}

impl DecodeOptions {
    pub fn lenient_offsets(mut self) -> Self {
        self.offset_mode = OffsetMode::Lenient;
        self
    }

    pub fn pass_through_labels(mut self) -> Self {
        self.label_policy = LabelPolicy::PassThrough;
        self
    }

    /// Applies the label policy. Returns whether a span with `label` may be
    /// emitted, recording a warning when the label is unknown.
    pub(crate) fn admit_label(
        &self,
        schema: &LabelSchema,
        label: &str,
        fragment: &str,
        out: &mut ParsedOutput,
    ) -> bool {
        if schema.contains(label) {
            return true;
        }
        match self.label_policy {
            LabelPolicy::PassThrough if is_valid_label_id(label) => {
                out.warn(
                    ParseWarning::new(
                        WarningCode::UnknownLabel,
                        format!("label {label:?} is not in the schema; kept"),
                        fragment,
                    )
                    .with_label(label),
                );
                true
            }
            _ => {
                out.warn(
                    ParseWarning::new(
                        WarningCode::UnknownLabel,
                        format!("label {label:?} is not in the schema; fragment skipped"),
                        fragment,
                    )
                    .with_label(label),
                );
                false
            }
        }
    }
}

/// Serializes a sentence in `format`.
pub fn encode(format: OutputFormat, schema: &LabelSchema, sentence: &AnnotatedSentence) -> Result<String, EncodeError> {
    match format {
        OutputFormat::InlineBracketed => encode_inline_bracketed(schema, sentence),
        OutputFormat::InlineXml => encode_inline_xml(schema, sentence),
        OutputFormat::CategoryJson => encode_category_json(schema, sentence),
        OutputFormat::OccurrenceJson => encode_occurrence_json(schema, sentence),
        OutputFormat::OffsetJson => encode_offset_json(schema, sentence),
    }
}

/// Parses model output in `format` against the source sentence text.
pub fn decode(
    format: OutputFormat,
    schema: &LabelSchema,
    source_text: &str,
    output: &str,
    options: &DecodeOptions,
) -> ParsedOutput {
    match format {
        OutputFormat::InlineBracketed => decode_inline_bracketed(schema, source_text, output, options),
        OutputFormat::InlineXml => decode_inline_xml(schema, source_text, output, options),
        OutputFormat::CategoryJson => decode_category_json(schema, source_text, output, options),
        OutputFormat::OccurrenceJson => decode_occurrence_json(schema, source_text, output, options),
        OutputFormat::OffsetJson => decode_offset_json(schema, source_text, output, options),
    }
}

/// Whether decoding the encoding of `sentence` gives back its exact spans.
///
/// Always true for the inline and offset formats (given a laminar family for
/// the inline ones). Category-grouped JSON carries no positions, so it only
/// round-trips when every `(label, text)` group sits on the leftmost
/// occurrences of its text; occurrence-based JSON needs every span to start
/// at a non-overlapping occurrence of its text.
pub fn is_positionally_recoverable(format: OutputFormat, sentence: &AnnotatedSentence) -> bool {
    match format {
        OutputFormat::InlineBracketed | OutputFormat::InlineXml => crate::model::laminar_check(sentence.entities()),
        OutputFormat::OffsetJson => true,
        OutputFormat::CategoryJson => category::is_recoverable(sentence),
        OutputFormat::OccurrenceJson => occurrence::is_recoverable(sentence),
    }
}

fn check_labels(schema: &LabelSchema, sentence: &AnnotatedSentence) -> Result<(), EncodeError> {
    match sentence.entities().iter().find(|s| !schema.contains(&s.label)) {
        Some(s) => Err(EncodeError::UnknownLabel(s.label.clone())),
        None => Ok(()),
    }
}

type MarkupFn = fn(&mut String, &str);

/// Writes the sentence with each span wrapped by `open`/`close`, escaping all
/// plain text.
fn render_inline(
    schema: &LabelSchema,
    sentence: &AnnotatedSentence,
    open: MarkupFn,
    close: MarkupFn,
) -> Result<String, EncodeError> {
    check_labels(schema, sentence)?;
    let forest =
        nesting_forest_by(sentence.entities(), |l| schema.rank(l).unwrap_or(usize::MAX)).map_err(|e| match e {
            ModelError::NotLaminar(a, b) => EncodeError::NotLaminar(a, b),
            other => unreachable!("nesting_forest only reports laminarity: {other}"),
        })?;
    let index = TextIndex::new(sentence.text());
    let mut out = String::with_capacity(sentence.text().len() * 2);
    emit_nodes(&index, &forest, 0, index.len(), &mut out, open, close);
    Ok(out)
}

fn emit_nodes(
    index: &TextIndex<'_>,
    nodes: &[NestingNode],
    from: usize,
    to: usize,
    out: &mut String,
    open: MarkupFn,
    close: MarkupFn,
) {
    let mut cursor = from;
    for node in nodes {
        escape::push_escaped(out, index.slice(cursor, node.span.start).unwrap_or_default());
        open(out, &node.span.label);
        emit_nodes(index, &node.children, node.span.start, node.span.end, out, open, close);
        close(out, &node.span.label);
        cursor = node.span.end;
    }
    escape::push_escaped(out, index.slice(cursor, to).unwrap_or_default());
}
