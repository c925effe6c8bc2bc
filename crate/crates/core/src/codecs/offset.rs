//! Offset-based JSON: `[{"text", "label", "start", "end"}, ...]`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{AnnotatedSentence, EntitySpan, LabelSchema, ParseWarning, ParsedOutput, TextIndex, WarningCode};

use super::json::{load, record_list, to_spaced_string};
use super::{check_labels, DecodeOptions, EncodeError, OffsetMode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffsetRecord {
    pub text: String,
    pub label: String,
    pub start: usize,
    pub end: usize,
}

pub fn encode_offset_json(schema: &LabelSchema, sentence: &AnnotatedSentence) -> Result<String, EncodeError> {
    check_labels(schema, sentence)?;
    let index = TextIndex::new(sentence.text());
    let records: Vec<OffsetRecord> = sentence
        .entities()
        .iter()
        .map(|s| OffsetRecord {
            text: index.slice(s.start, s.end).unwrap_or_default().to_string(),
            label: s.label.clone(),
            start: s.start,
            end: s.end,
        })
        .collect();
    Ok(to_spaced_string(&records))
}

fn offset_field(record: &Value, key: &str) -> Option<usize> {
    let v = record.get(key)?;
    v.as_u64()
        .map(|n| n as usize)
        .or_else(|| v.as_str().and_then(|s| s.trim().parse().ok()))
}

/// Start of the occurrence of `text` nearest to `hint`; the earlier one on ties.
fn nearest_occurrence(index: &TextIndex<'_>, text: &str, hint: usize) -> Option<usize> {
    index
        .occurrences(text)
        .into_iter()
        .min_by_key(|&p| (p.abs_diff(hint), p))
}

pub fn decode_offset_json(
    schema: &LabelSchema,
    source_text: &str,
    output: &str,
    options: &DecodeOptions,
) -> ParsedOutput {
    let mut out = ParsedOutput::new();
    let Some(records) = load(output, &mut out).and_then(|v| record_list(v, &mut out)) else {
        return out;
    };
    let index = TextIndex::new(source_text);
    for record in records {
        let fragment = record.to_string();
        let (Some(text), Some(label)) = (
            record.get("text").and_then(Value::as_str),
            record.get("label").and_then(Value::as_str),
        ) else {
            out.warn(ParseWarning::new(
                WarningCode::MalformedRecord,
                "record needs string fields text and label",
                fragment,
            ));
            continue;
        };
        let (Some(start), Some(end)) = (offset_field(&record, "start"), offset_field(&record, "end")) else {
            out.warn(
                ParseWarning::new(
                    WarningCode::MalformedRecord,
                    "start and end must be non-negative integers",
                    fragment,
                )
                .with_label(label),
            );
            continue;
        };
        if end <= start || end > index.len() {
            out.warn(
                ParseWarning::new(
                    WarningCode::InvalidOffsets,
                    format!(
                        "offsets ({start}, {end}) are invalid for a text of {} characters",
                        index.len()
                    ),
                    fragment,
                )
                .with_label(label),
            );
            continue;
        }
        if !options.admit_label(schema, label, &fragment, &mut out) {
            continue;
        }
        let found = index.slice(start, end).unwrap_or_default();
        if found == text {
            out.push_entity(EntitySpan::new(start, end, label));
            continue;
        }
        let message = format!("source has {found:?} at ({start}, {end})");
        match options.offset_mode {
            OffsetMode::Strict => {
                out.warn(ParseWarning::new(WarningCode::OffsetTextMismatch, message, fragment).with_label(label));
            }
            OffsetMode::Lenient => match nearest_occurrence(&index, text, start).filter(|_| !text.is_empty()) {
                Some(p) => {
                    out.warn(
                        ParseWarning::new(
                            WarningCode::OffsetTextMismatch,
                            format!("{message}; re-resolved to {p}"),
                            fragment,
                        )
                        .with_label(label),
                    );
                    out.push_entity(EntitySpan::new(p, p + crate::model::char_len(text), label));
                }
                None => out.warn(
                    ParseWarning::new(
                        WarningCode::MentionNotFound,
                        "mention does not occur in the source",
                        text,
                    )
                    .with_label(label),
                ),
            },
        }
    }
    out.finish()
}
