//! Maps spans found in markup-stripped inline output back onto the source.
//!
//! Three tiers, tried in order:
//! 1. the stripped text equals the source: offsets carry over unchanged;
//! 2. they differ only in whitespace: offsets are mapped through the
//!    non-whitespace characters (`AlignmentRepaired`);
//! 3. otherwise each mention is resolved by occurrence in the source
//!    (`AlignmentFailed`, plus a per-span warning when that fails too).

use crate::model::{EntitySpan, ParseWarning, ParsedOutput, TextIndex, WarningCode};

use super::resolve::{resolve_in, ResolveError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawSpan {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

pub(crate) fn align_into(source: &str, stripped: &[char], spans: Vec<RawSpan>, out: &mut ParsedOutput) {
    let source_chars: Vec<char> = source.chars().collect();
    if source_chars == stripped {
        for s in spans {
            out.push_entity(EntitySpan::new(s.start, s.end, s.label));
        }
        return;
    }

    let src_solid: Vec<usize> = solid_positions(&source_chars);
    let out_solid: Vec<usize> = solid_positions(stripped);
    let same_solid = src_solid.len() == out_solid.len()
        && src_solid
            .iter()
            .zip(&out_solid)
            .all(|(&a, &b)| source_chars[a] == stripped[b]);
    if same_solid {
        out.warn(ParseWarning::new(
            WarningCode::AlignmentRepaired,
            "output differs from the source in whitespace only",
            String::new(),
        ));
        for s in spans {
            let first = out_solid.partition_point(|&p| p < s.start);
            let last = out_solid.partition_point(|&p| p < s.end);
            if first >= last {
                let text: String = stripped[s.start..s.end].iter().collect();
                out.warn(
                    ParseWarning::new(WarningCode::EmptyMention, "mention is only whitespace", text)
                        .with_label(s.label),
                );
                continue;
            }
            out.push_entity(EntitySpan::new(src_solid[first], src_solid[last - 1] + 1, s.label));
        }
        return;
    }

    if spans.is_empty() {
        out.warn(ParseWarning::new(
            WarningCode::AlignmentFailed,
            "output text does not match the source",
            String::new(),
        ));
        return;
    }
    out.warn(ParseWarning::new(
        WarningCode::AlignmentFailed,
        "output text does not match the source; spans resolved by occurrence",
        String::new(),
    ));
    let stripped_text: String = stripped.iter().collect();
    let stripped_index = TextIndex::new(&stripped_text);
    let source_index = TextIndex::new(source);
    for s in spans {
        let mention = stripped_index.slice(s.start, s.end).unwrap_or_default();
        let occ = stripped_index.occurrences(mention);
        let k = match occ.iter().position(|&p| p == s.start) {
            Some(i) => i + 1,
            None => occ.iter().filter(|&&p| p < s.start).count() + 1,
        };
        match resolve_in(&source_index, mention, k) {
            Ok((start, end)) => out.push_entity(EntitySpan::new(start, end, s.label)),
            Err(e) => out.warn(resolve_warning(e, mention, &s.label)),
        }
    }
}

pub(crate) fn resolve_warning(err: ResolveError, mention: &str, label: &str) -> ParseWarning {
    let (code, message) = match err {
        ResolveError::NotFound { found: 0, .. } | ResolveError::InvalidQuery => (
            WarningCode::MentionNotFound,
            "mention does not occur in the source".to_string(),
        ),
        e @ ResolveError::NotFound { .. } => (WarningCode::OccurrenceOutOfRange, e.to_string()),
    };
    ParseWarning::new(code, message, mention).with_label(label)
}

fn solid_positions(chars: &[char]) -> Vec<usize> {
    chars
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, _)| i)
        .collect()
}
