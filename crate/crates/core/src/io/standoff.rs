//! JSONL standoff corpora: `{"id", "text", "entities": [{"start", "end", "label"}]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{AnnotatedSentence, EntitySpan};

use super::{read_utf8, IoError, IoWarning};

#[derive(Debug, Deserialize)]
struct InRecord {
    id: IdValue,
    text: String,
    #[serde(default)]
    entities: Vec<EntitySpan>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum IdValue {
    Str(String),
    Num(u64),
}

#[derive(Serialize)]
struct OutRecord<'a> {
    id: &'a str,
    text: &'a str,
    entities: &'a [EntitySpan],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StandoffCorpus {
    pub sentences: Vec<AnnotatedSentence>,
    pub warnings: Vec<IoWarning>,
}

/// Parses JSONL standoff records. Blank lines are skipped; duplicate spans are
/// collapsed with a warning; every other violation is an error naming the line.
pub fn parse_standoff(input: &str, source_name: &str) -> Result<StandoffCorpus, IoError> {
    let mut corpus = StandoffCorpus::default();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: InRecord =
            serde_json::from_str(line).map_err(|e| IoError::violation(source_name, line_no, e.to_string()))?;
        let id = match rec.id {
            IdValue::Str(s) => s,
            IdValue::Num(n) => n.to_string(),
        };
        let (sentence, dropped) = AnnotatedSentence::new_dedup(id, rec.text, rec.entities)
            .map_err(|e| IoError::violation(source_name, line_no, e.to_string()))?;
        if dropped > 0 {
            corpus.warnings.push(IoWarning {
                line: line_no,
                message: format!("{dropped} duplicate span(s) collapsed"),
            });
        }
        corpus.sentences.push(sentence);
    }
    Ok(corpus)
}

pub fn read_standoff_json(path: impl AsRef<Path>) -> Result<StandoffCorpus, IoError> {
    let path = path.as_ref();
    parse_standoff(&read_utf8(path)?, &path.display().to_string())
}

/// One compact JSON object per line, entities in canonical order.
pub fn write_standoff(sentences: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        let rec = OutRecord {
            id: s.id(),
            text: s.text(),
            entities: s.entities(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("standoff records serialize"));
        out.push('\n');
    }
    out
}
