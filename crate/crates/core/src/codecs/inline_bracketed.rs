//! `[mention | LABEL]` markup.

use crate::model::{AnnotatedSentence, LabelSchema, ParseWarning, ParsedOutput, WarningCode};

use super::align::{align_into, RawSpan};
use super::escape::{lex, Lexeme};
use super::{render_inline, DecodeOptions, EncodeError};

pub fn encode_inline_bracketed(schema: &LabelSchema, sentence: &AnnotatedSentence) -> Result<String, EncodeError> {
    render_inline(
        schema,
        sentence,
        |out, _| out.push('['),
        |out, label| {
            out.push_str(" | ");
            out.push_str(label);
            out.push(']');
        },
    )
}

#[derive(Debug)]
struct Frame {
    start: usize,
    // Some once the separator has been seen; holds the label read so far
    label: Option<String>,
    trimmed_space: bool,
}

impl Frame {
    /// Puts the separator and label text back into the mention.
    fn unread_label(&mut self, stripped: &mut Vec<char>) {
        if let Some(label) = self.label.take() {
            if self.trimmed_space {
                stripped.push(' ');
            }
            stripped.push('|');
            stripped.extend(label.chars());
        }
        self.trimmed_space = false;
    }
}

fn reinsert(stripped: &mut Vec<char>, spans: &mut [RawSpan], at: usize, c: char) {
    stripped.insert(at, c);
    for s in spans.iter_mut().filter(|s| s.start >= at) {
        s.start += 1;
        s.end += 1;
    }
}

/// Parses bracketed inline output. Groups nest; the last unescaped `|` in a
/// group separates the mention from its label. Brackets without a partner
/// are kept as text and reported.
pub fn decode_inline_bracketed(
    schema: &LabelSchema,
    source_text: &str,
    output: &str,
    options: &DecodeOptions,
) -> ParsedOutput {
    let mut out = ParsedOutput::new();
    let mut stripped: Vec<char> = Vec::with_capacity(output.len());
    let mut frames: Vec<Frame> = Vec::new();
    let mut spans: Vec<RawSpan> = Vec::new();

    for lexeme in lex(output) {
        let in_label = frames.last().is_some_and(|f| f.label.is_some());
        let c = match lexeme {
            Lexeme::Literal(c) => {
                match frames.last_mut().and_then(|f| f.label.as_mut()) {
                    Some(label) => label.push(c),
                    None => stripped.push(c),
                }
                continue;
            }
            Lexeme::Raw(c) => c,
        };
        match c {
            '[' if !in_label => frames.push(Frame {
                start: stripped.len(),
                label: None,
                trimmed_space: false,
            }),
            '|' if !frames.is_empty() => {
                let frame = frames.last_mut().expect("non-empty");
                // a second separator means the first one belonged to the mention
                frame.unread_label(&mut stripped);
                if stripped.len() > frame.start && stripped.last() == Some(&' ') {
                    stripped.pop();
                    frame.trimmed_space = true;
                }
                frame.label = Some(String::new());
            }
            ']' => match frames.pop() {
                None => {
                    out.warn(ParseWarning::new(
                        WarningCode::UnbalancedMarkup,
                        "closing bracket without an opening bracket",
                        "]",
                    ));
                    stripped.push(']');
                }
                Some(Frame {
                    start,
                    label: Some(label),
                    ..
                }) => {
                    let label = label.trim();
                    let mention: String = stripped[start..].iter().collect();
                    let fragment = format!("[{mention} | {label}]");
                    if mention.is_empty() {
                        out.warn(
                            ParseWarning::new(WarningCode::EmptyMention, "empty bracket group", fragment)
                                .with_label(label),
                        );
                    } else if options.admit_label(schema, label, &fragment, &mut out) {
                        spans.push(RawSpan {
                            start,
                            end: stripped.len(),
                            label: label.to_string(),
                        });
                    }
                }
                Some(Frame { start, label: None, .. }) => {
                    let content: String = stripped[start..].iter().collect();
                    out.warn(ParseWarning::new(
                        WarningCode::UnbalancedMarkup,
                        "bracket group without a label",
                        format!("[{content}]"),
                    ));
                    reinsert(&mut stripped, &mut spans, start, '[');
                    stripped.push(']');
                }
            },
            c => match frames.last_mut().and_then(|f| f.label.as_mut()) {
                Some(label) => label.push(c),
                None => stripped.push(c),
            },
        }
    }

    while let Some(mut frame) = frames.pop() {
        frame.unread_label(&mut stripped);
        let content: String = stripped[frame.start..].iter().collect();
        out.warn(ParseWarning::new(
            WarningCode::UnbalancedMarkup,
            "opening bracket is never closed",
            format!("[{content}"),
        ));
        reinsert(&mut stripped, &mut spans, frame.start, '[');
    }

    align_into(source_text, &stripped, spans, &mut out);
    out.finish()
}
