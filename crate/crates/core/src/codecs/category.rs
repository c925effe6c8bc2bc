//! Category-grouped JSON: `{"LABEL": ["mention", ...], ...}`.

use std::collections::HashMap;

use serde_json::{Map, Value};

use crate::model::{AnnotatedSentence, EntitySpan, LabelSchema, ParseWarning, ParsedOutput, TextIndex, WarningCode};

use super::align::resolve_warning;
use super::json::{load, to_spaced_string};
use super::resolve::resolve_in;
use super::{check_labels, DecodeOptions, EncodeError};

/// Every schema label becomes a key, in schema order; mentions follow span
/// order and repeat once per span.
pub fn encode_category_json(schema: &LabelSchema, sentence: &AnnotatedSentence) -> Result<String, EncodeError> {
    check_labels(schema, sentence)?;
    let mut map = Map::new();
    for id in schema.ids() {
        let mentions: Vec<Value> = sentence
            .entities()
            .iter()
            .filter(|s| s.label == id)
            .map(|s| Value::String(sentence.mention(s).unwrap_or_default().to_string()))
            .collect();
        map.insert(id.to_string(), Value::Array(mentions));
    }
    Ok(to_spaced_string(&Value::Object(map)))
}

/// `(label, mention text)` pairs of a sentence, in span order. This is all the
/// information category-grouped output carries.
pub fn category_mentions(sentence: &AnnotatedSentence) -> Vec<(String, String)> {
    sentence
        .entities()
        .iter()
        .map(|s| (s.label.clone(), sentence.mention(s).unwrap_or_default().to_string()))
        .collect()
}

/// Each `(label, text)` group must occupy the leftmost non-overlapping
/// occurrences of its text.
pub(crate) fn is_recoverable(sentence: &AnnotatedSentence) -> bool {
    let index = TextIndex::new(sentence.text());
    let mut groups: HashMap<(&str, &str), Vec<usize>> = HashMap::new();
    for s in sentence.entities() {
        let text = sentence.mention(s).unwrap_or_default();
        groups.entry((&s.label, text)).or_default().push(s.start);
    }
    groups.into_iter().all(|((_, text), mut starts)| {
        starts.sort_unstable();
        let occ = index.occurrences(text);
        occ.len() >= starts.len() && occ[..starts.len()] == starts[..]
    })
}

/// Each listed mention claims the leftmost occurrence of its text not yet
/// claimed by the same label.
pub fn decode_category_json(
    schema: &LabelSchema,
    source_text: &str,
    output: &str,
    options: &DecodeOptions,
) -> ParsedOutput {
    let mut out = ParsedOutput::new();
    let Some(value) = load(output, &mut out) else {
        return out;
    };
    let Value::Object(map) = value else {
        out.warn(ParseWarning::new(
            WarningCode::ParseFailure,
            "expected a JSON object keyed by label",
            value.to_string(),
        ));
        return out;
    };
    let index = TextIndex::new(source_text);
    for (label, mentions) in map {
        let Value::Array(mentions) = mentions else {
            out.warn(
                ParseWarning::new(
                    WarningCode::MalformedRecord,
                    "label must map to a list of strings",
                    mentions.to_string(),
                )
                .with_label(label),
            );
            continue;
        };
        if mentions.is_empty() {
            continue;
        }
        if !options.admit_label(schema, &label, &label, &mut out) {
            continue;
        }
        let mut claimed: HashMap<String, usize> = HashMap::new();
        for mention in mentions {
            let Value::String(text) = mention else {
                out.warn(
                    ParseWarning::new(
                        WarningCode::MalformedRecord,
                        "mention is not a string",
                        mention.to_string(),
                    )
                    .with_label(&label),
                );
                continue;
            };
            if text.is_empty() {
                out.warn(ParseWarning::new(WarningCode::EmptyMention, "empty mention", text).with_label(&label));
                continue;
            }
            let k = claimed.entry(text.clone()).or_insert(0);
            *k += 1;
            match resolve_in(&index, &text, *k) {
                Ok((start, end)) => out.push_entity(EntitySpan::new(start, end, &label)),
                Err(e) => out.warn(resolve_warning(e, &text, &label)),
            }
        }
    }
    out.finish()
}
