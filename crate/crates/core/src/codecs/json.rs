//! JSON plumbing shared by the three JSON formats.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::model::{ParseWarning, ParsedOutput, WarningCode};

/// Compact JSON with a space after `,` and `:`.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct SpacedFormatter;

impl Formatter for SpacedFormatter {
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            writer.write_all(b", ")
        }
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            writer.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        writer.write_all(b": ")
    }
}

pub(crate) fn to_spaced_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SpacedFormatter);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Result of [`parse_json_lenient`].
#[derive(Debug, Clone, PartialEq)]
pub struct LenientJson {
    pub value: Value,
    /// Whether the repair pass was needed.
    pub repaired: bool,
}

/// Parses model output as JSON, with one repair pass on failure: code fences
/// and surrounding prose are dropped, unterminated strings and brackets are
/// closed, and trailing commas removed. Returns `None` if that fails too.
pub fn parse_json_lenient(output: &str) -> Option<LenientJson> {
    if let Ok(value) = serde_json::from_str(output.trim()) {
        return Some(LenientJson { value, repaired: false });
    }
    let repaired = repair(output)?;
    serde_json::from_str(&repaired)
        .ok()
        .map(|value| LenientJson { value, repaired: true })
}

/// Parses output for a decoder, recording `JsonRepaired` or `ParseFailure`.
pub(crate) fn load(output: &str, out: &mut ParsedOutput) -> Option<Value> {
    match parse_json_lenient(output) {
        Some(LenientJson { value, repaired }) => {
            if repaired {
                out.warn(ParseWarning::new(
                    WarningCode::JsonRepaired,
                    "output was not valid JSON and was repaired",
                    output,
                ));
            }
            Some(value)
        }
        None => {
            out.warn(ParseWarning::new(
                WarningCode::ParseFailure,
                "output is not JSON",
                output,
            ));
            None
        }
    }
}

/// Top-level list of records. A lone object wrapping a single list is
/// unwrapped with a warning.
pub(crate) fn record_list(value: Value, out: &mut ParsedOutput) -> Option<Vec<Value>> {
    match value {
        Value::Array(items) => Some(items),
        Value::Object(map) => {
            let mut lists = map.into_iter().filter_map(|(k, v)| match v {
                Value::Array(items) => Some((k, items)),
                _ => None,
            });
            match (lists.next(), lists.next()) {
                (Some((key, items)), None) => {
                    out.warn(ParseWarning::new(
                        WarningCode::JsonRepaired,
                        format!("records were wrapped in an object under {key:?}"),
                        key,
                    ));
                    Some(items)
                }
                _ => {
                    out.warn(ParseWarning::new(
                        WarningCode::ParseFailure,
                        "expected a JSON list of records",
                        "{...}",
                    ));
                    None
                }
            }
        }
        other => {
            out.warn(ParseWarning::new(
                WarningCode::ParseFailure,
                "expected a JSON list of records",
                other.to_string(),
            ));
            None
        }
    }
}

fn repair(output: &str) -> Option<String> {
    let unfenced: String = output
        .lines()
        .filter(|l| !l.trim_start().starts_with("```"))
        .collect::<Vec<_>>()
        .join("\n");
    let begin = unfenced.find(['{', '['])?;
    let body = &unfenced[begin..];

    let mut out = String::with_capacity(body.len() + 8);
    let mut stack: Vec<char> = Vec::new();
    let mut in_string = false;
    let mut escaped = false;
    for c in body.chars() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => stack.push('}'),
            '[' => stack.push(']'),
            '}' | ']' => {
                if stack.last() != Some(&c) {
                    // a closer that matches nothing; stop before it
                    break;
                }
                strip_trailing_comma(&mut out);
                stack.pop();
                out.push(c);
                if stack.is_empty() {
                    return Some(out);
                }
                continue;
            }
            _ => {}
        }
        out.push(c);
    }

    if in_string {
        if escaped {
            out.pop();
        }
        out.push('"');
    }
    strip_trailing_comma(&mut out);
    if out.trim_end().ends_with(':') {
        out.push_str(" null");
    }
    while let Some(closer) = stack.pop() {
        strip_trailing_comma(&mut out);
        out.push(closer);
    }
    Some(out)
}

fn strip_trailing_comma(out: &mut String) {
    let trimmed = out.trim_end().len();
    out.truncate(trimmed);
    if out.ends_with(',') {
        out.pop();
    }
}
