//! Occurrence-based JSON: `[{"text", "label", "occurrence_index"}, ...]`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{AnnotatedSentence, EntitySpan, LabelSchema, ParseWarning, ParsedOutput, TextIndex, WarningCode};

use super::align::resolve_warning;
use super::json::{load, record_list, to_spaced_string};
use super::resolve::{occurrence_index_of, resolve_in};
use super::{check_labels, DecodeOptions, EncodeError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceRecord {
    pub text: String,
    pub label: String,
    /// 1-based position among the non-overlapping occurrences of `text`.
    pub occurrence_index: usize,
}

pub fn encode_occurrence_json(schema: &LabelSchema, sentence: &AnnotatedSentence) -> Result<String, EncodeError> {
    check_labels(schema, sentence)?;
    let index = TextIndex::new(sentence.text());
    let records = sentence
        .entities()
        .iter()
        .map(|s| {
            let text = index.slice(s.start, s.end).unwrap_or_default();
            occurrence_index_of(&index, text, s.start)
                .map(|k| OccurrenceRecord {
                    text: text.to_string(),
                    label: s.label.clone(),
                    occurrence_index: k,
                })
                .ok_or_else(|| EncodeError::UnrepresentablePosition(s.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(to_spaced_string(&records))
}

pub(crate) fn is_recoverable(sentence: &AnnotatedSentence) -> bool {
    let index = TextIndex::new(sentence.text());
    sentence.entities().iter().all(|s| {
        let text = index.slice(s.start, s.end).unwrap_or_default();
        occurrence_index_of(&index, text, s.start).is_some()
    })
}

pub fn decode_occurrence_json(
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
        let k = match record.get("occurrence_index") {
            Some(v) => match v.as_i64().or_else(|| v.as_str().and_then(|s| s.trim().parse().ok())) {
                Some(k) if k >= 1 => k as usize,
                Some(_) => {
                    out.warn(
                        ParseWarning::new(
                            WarningCode::InvalidOccurrenceIndex,
                            "occurrence_index must be at least 1",
                            fragment,
                        )
                        .with_label(label),
                    );
                    continue;
                }
                None => {
                    out.warn(
                        ParseWarning::new(
                            WarningCode::MalformedRecord,
                            "occurrence_index is not an integer",
                            fragment,
                        )
                        .with_label(label),
                    );
                    continue;
                }
            },
            None => {
                out.warn(
                    ParseWarning::new(WarningCode::MalformedRecord, "record has no occurrence_index", fragment)
                        .with_label(label),
                );
                continue;
            }
        };
        if text.is_empty() {
            out.warn(ParseWarning::new(WarningCode::EmptyMention, "empty mention", fragment).with_label(label));
            continue;
        }
        if !options.admit_label(schema, label, &fragment, &mut out) {
            continue;
        }
        match resolve_in(&index, text, k) {
            Ok((start, end)) => out.push_entity(EntitySpan::new(start, end, label)),
            Err(e) => out.warn(resolve_warning(e, text, label)),
        }
    }
    out.finish()
}
