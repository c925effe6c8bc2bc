//! Token-per-line BIO column files.

use std::path::Path;

use crate::model::{AnnotatedSentence, EntitySpan};

use super::{read_utf8, IoError, IoWarning};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConllCorpus {
    pub sentences: Vec<AnnotatedSentence>,
    pub warnings: Vec<IoWarning>,
}

struct Builder {
    text: String,
    len: usize,
    spans: Vec<EntitySpan>,
    // label and start of the entity still open
    open: Option<(String, usize)>,
}

impl Builder {
    fn new() -> Self {
        Self {
            text: String::new(),
            len: 0,
            spans: Vec::new(),
            open: None,
        }
    }

    fn is_empty(&self) -> bool {
        self.len == 0 && self.text.is_empty()
    }

    fn close(&mut self) {
        if let Some((label, start)) = self.open.take() {
            self.spans.push(EntitySpan::new(start, self.len, label));
        }
    }

    fn push_token(&mut self, token: &str) -> usize {
        if !self.text.is_empty() {
            self.text.push(' ');
            self.len += 1;
        }
        let start = self.len;
        self.text.push_str(token);
        self.len += token.chars().count();
        start
    }
}

/// Parses BIO column text. The first column is the token and the last the
/// tag; tokens are joined with single spaces. An `I-` tag that does not
/// continue an entity of the same label starts a new one, with a warning.
pub fn parse_conll(input: &str, source_name: &str) -> Result<ConllCorpus, IoError> {
    let mut corpus = ConllCorpus::default();
    let mut cur = Builder::new();
    let flush = |cur: &mut Builder, corpus: &mut ConllCorpus, line: usize| -> Result<(), IoError> {
        if cur.is_empty() {
            return Ok(());
        }
        cur.close();
        let b = std::mem::replace(cur, Builder::new());
        let id = corpus.sentences.len().to_string();
        let s = AnnotatedSentence::new(id, b.text, b.spans)
            .map_err(|e| IoError::violation(source_name, line, e.to_string()))?;
        corpus.sentences.push(s);
        Ok(())
    };

    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.is_empty() {
            flush(&mut cur, &mut corpus, line_no)?;
            continue;
        }
        if cols[0] == "-DOCSTART-" {
            flush(&mut cur, &mut corpus, line_no)?;
            continue;
        }
        if cols.len() < 2 {
            return Err(IoError::violation(
                source_name,
                line_no,
                "expected a token and a tag column",
            ));
        }
        let token = cols[0];
        let tag = cols[cols.len() - 1];
        let (prefix, label) = match tag.split_once('-') {
            _ if tag == "O" => ("O", ""),
            Some((p @ ("B" | "I"), l)) if !l.is_empty() => (p, l),
            _ => {
                return Err(IoError::violation(
                    source_name,
                    line_no,
                    format!("unrecognized tag {tag:?}"),
                ));
            }
        };
        let continues = prefix == "I" && cur.open.as_ref().is_some_and(|(l, _)| l == label);
        if !continues {
            cur.close();
        }
        let start = cur.push_token(token);
        match prefix {
            "B" => cur.open = Some((label.to_string(), start)),
            "I" if !continues => {
                corpus.warnings.push(IoWarning {
                    line: line_no,
                    message: format!("{tag} does not continue an entity; read as B-{label}"),
                });
                cur.open = Some((label.to_string(), start));
            }
            _ => {}
        }
    }
    let end = input.lines().count() + 1;
    flush(&mut cur, &mut corpus, end)?;
    Ok(corpus)
}

pub fn read_conll_columns(path: impl AsRef<Path>) -> Result<ConllCorpus, IoError> {
    let path = path.as_ref();
    parse_conll(&read_utf8(path)?, &path.display().to_string())
}

/// Writes flat sentences as `token tag` lines. Tokens are the
/// whitespace-separated pieces of the text; a span that does not fall on token
/// boundaries, or that nests, cannot be written and yields `None`.
pub fn write_conll_columns(sentences: &[AnnotatedSentence]) -> Option<String> {
    let mut out = String::new();
    for s in sentences {
        let mut pos = 0;
        let mut tokens = Vec::new();
        for tok in s.text().split(' ') {
            let len = tok.chars().count();
            if len > 0 {
                tokens.push((pos, pos + len, tok));
            }
            pos += len + 1;
        }
        let mut tags = vec!["O".to_string(); tokens.len()];
        for e in s.entities() {
            let first = tokens.iter().position(|t| t.0 == e.start)?;
            let last = tokens.iter().position(|t| t.1 == e.end)?;
            if last < first || tags[first..=last].iter().any(|t| t != "O") {
                return None;
            }
            tags[first] = format!("B-{}", e.label);
            for t in &mut tags[first + 1..=last] {
                *t = format!("I-{}", e.label);
            }
        }
        for ((_, _, tok), tag) in tokens.iter().zip(&tags) {
            out.push_str(tok);
            out.push(' ');
            out.push_str(tag);
            out.push('\n');
        }
        out.push('\n');
    }
    Some(out)
}
