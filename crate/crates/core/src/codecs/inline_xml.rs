//! `<LABEL>mention</LABEL>` markup.

use crate::model::{AnnotatedSentence, LabelSchema, ParseWarning, ParsedOutput, WarningCode};

use super::align::{align_into, RawSpan};
use super::escape::{lex, Lexeme};
use super::{render_inline, DecodeOptions, EncodeError};

pub fn encode_inline_xml(schema: &LabelSchema, sentence: &AnnotatedSentence) -> Result<String, EncodeError> {
    render_inline(
        schema,
        sentence,
        |out, label| {
            out.push('<');
            out.push_str(label);
            out.push('>');
        },
        |out, label| {
            out.push_str("</");
            out.push_str(label);
            out.push('>');
        },
    )
}

fn is_name_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '<' | '>' | '/' | '\\'))
}

/// Reads a tag starting at `lexemes[i]` (which must be a raw `<`). Returns
/// `(closing, name, index after the tag)`.
fn read_tag(lexemes: &[Lexeme], i: usize) -> Option<(bool, String, usize)> {
    let mut j = i + 1;
    let closing = lexemes.get(j) == Some(&Lexeme::Raw('/'));
    if closing {
        j += 1;
    }
    let mut name = String::new();
    while let Some(Lexeme::Raw(c)) = lexemes.get(j) {
        if !is_name_char(*c) {
            break;
        }
        name.push(*c);
        j += 1;
    }
    if name.is_empty() || lexemes.get(j) != Some(&Lexeme::Raw('>')) {
        return None;
    }
    Some((closing, name, j + 1))
}

/// Parses XML-style inline output. A close tag closes the innermost open tag
/// of the same name; open tags skipped over that way are dropped. Anything
/// that is not a well-formed tag is text.
pub fn decode_inline_xml(
    schema: &LabelSchema,
    source_text: &str,
    output: &str,
    options: &DecodeOptions,
) -> ParsedOutput {
    let mut out = ParsedOutput::new();
    let lexemes = lex(output);
    let mut stripped: Vec<char> = Vec::with_capacity(output.len());
    let mut frames: Vec<(String, usize)> = Vec::new();
    let mut spans: Vec<RawSpan> = Vec::new();

    let mut i = 0;
    while i < lexemes.len() {
        let tag = match lexemes[i] {
            Lexeme::Raw('<') => read_tag(&lexemes, i),
            _ => None,
        };
        let Some((closing, name, next)) = tag else {
            stripped.push(match lexemes[i] {
                Lexeme::Literal(c) | Lexeme::Raw(c) => c,
            });
            i += 1;
            continue;
        };
        i = next;
        if !closing {
            frames.push((name, stripped.len()));
            continue;
        }
        let Some(pos) = frames.iter().rposition(|(l, _)| *l == name) else {
            out.warn(ParseWarning::new(
                WarningCode::MismatchedTag,
                "close tag without a matching open tag",
                format!("</{name}>"),
            ));
            continue;
        };
        for (label, start) in frames.drain(pos + 1..) {
            let text: String = stripped[start..].iter().collect();
            out.warn(
                ParseWarning::new(
                    WarningCode::MismatchedTag,
                    format!("<{label}> is closed by </{name}>"),
                    format!("<{label}>{text}"),
                )
                .with_label(label),
            );
        }
        let (label, start) = frames.pop().expect("matched frame");
        let mention: String = stripped[start..].iter().collect();
        let fragment = format!("<{label}>{mention}</{label}>");
        if mention.is_empty() {
            out.warn(ParseWarning::new(WarningCode::EmptyMention, "empty element", fragment).with_label(label));
        } else if options.admit_label(schema, &label, &fragment, &mut out) {
            spans.push(RawSpan {
                start,
                end: stripped.len(),
                label,
            });
        }
    }

    for (label, start) in frames {
        let text: String = stripped[start..].iter().collect();
        out.warn(
            ParseWarning::new(
                WarningCode::UnbalancedMarkup,
                "open tag is never closed",
                format!("<{label}>{text}"),
            )
            .with_label(label),
        );
    }

    align_into(source_text, &stripped, spans, &mut out);
    out.finish()
}
