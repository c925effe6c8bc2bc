//! Backslash escaping for text embedded in inline markup.

/// Characters that carry meaning in either inline format, plus the escape
/// character itself.
pub(crate) const SPECIAL: [char; 6] = ['[', ']', '|', '<', '>', '\\'];

pub(crate) fn push_escaped(out: &mut String, text: &str) {
    for c in text.chars() {
        if SPECIAL.contains(&c) {
            out.push('\\');
        }
        out.push(c);
    }
}

/// Escapes every markup character in `text` with a backslash.
pub fn escape_inline(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    push_escaped(&mut out, text);
    out
}

/// Inverse of [`escape_inline`]. A trailing lone backslash is kept literally.
pub fn unescape_inline(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            out.push(chars.next().unwrap_or('\\'));
        } else {
            out.push(c);
        }
    }
    out
}

/// A character of inline model output after escape processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Lexeme {
    /// Escaped character; always text.
    Literal(char),
    /// Unescaped character; may be markup.
    Raw(char),
}

pub(crate) fn lex(output: &str) -> Vec<Lexeme> {
    let mut out = Vec::with_capacity(output.len());
    let mut chars = output.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some(n) => out.push(Lexeme::Literal(n)),
                None => out.push(Lexeme::Literal('\\')),
            }
        } else {
            out.push(Lexeme::Raw(c));
        }
    }
    out
}
