//! Replacing label names with opaque symbols.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codecs::{encode_inline_xml, EncodeError};
use crate::model::{
    is_valid_label_id, AnnotatedSentence, EntitySpan, LabelDef, LabelSchema, ModelError, ParseWarning, ParsedOutput,
    WarningCode,
};

pub const DEFAULT_ALPHABET: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolMode {
    /// Symbols plus the definition of each one.
    #[default]
    Se,
    /// Symbols only.
    So,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("alphabet has {have} symbols but the schema has {need} labels")]
    AlphabetTooSmall { need: usize, have: usize },
    #[error("symbol {0:?} appears twice in the alphabet")]
    DuplicateSymbol(char),
    #[error("symbol {0:?} cannot be used as a label")]
    InvalidSymbol(char),
    #[error("label {0:?} has no symbol")]
    UnmappedLabel(String),
    #[error("symbol {0:?} has no label")]
    UnmappedSymbol(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolPair {
    pub label: String,
    pub symbol: String,
}

/// Bijection between schema labels and symbols, assigned in schema order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolMapping {
    pub mode: SymbolMode,
    pub pairs: Vec<SymbolPair>,
}

impl SymbolMapping {
    pub fn new(schema: &LabelSchema, mode: SymbolMode, alphabet: &str) -> Result<Self, SymbolError> {
        let symbols: Vec<char> = alphabet.chars().collect();
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(SymbolError::DuplicateSymbol(*c));
            }
            if !is_valid_label_id(&c.to_string()) {
                return Err(SymbolError::InvalidSymbol(*c));
            }
        }
        if symbols.len() < schema.len() {
            return Err(SymbolError::AlphabetTooSmall {
                need: schema.len(),
                have: symbols.len(),
            });
        }
        let pairs = schema
            .ids()
            .zip(symbols)
            .map(|(label, symbol)| SymbolPair {
                label: label.to_string(),
                symbol: symbol.to_string(),
            })
            .collect();
        Ok(Self { mode, pairs })
    }

    pub fn symbol_for(&self, label: &str) -> Option<&str> {
        self.pairs.iter().find(|p| p.label == label).map(|p| p.symbol.as_str())
    }

    pub fn label_for(&self, symbol: &str) -> Option<&str> {
        self.pairs.iter().find(|p| p.symbol == symbol).map(|p| p.label.as_str())
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|p| p.symbol.as_str())
    }

    /// Schema over the symbols, carrying the original definitions.
    pub fn symbol_schema(&self, schema: &LabelSchema) -> Result<LabelSchema, SymbolError> {
        let labels = self
            .pairs
            .iter()
            .map(|p| {
                let definition = schema.get(&p.label).map(|d| d.definition.clone()).unwrap_or_default();
                LabelDef::new(p.symbol.clone(), definition)
            })
            .collect();
        Ok(LabelSchema::new(
            format!("{}-{:?}", schema.dataset_name(), self.mode).to_uppercase(),
            labels,
        )?)
    }

    /// The instruction shown with symbolized data.
    pub fn instruction(&self, schema: &LabelSchema) -> String {
        let symbols: Vec<&str> = self.symbols().collect();
        let listed = match symbols.as_slice() {
            [] => String::new(),
            [one] => one.to_string(),
            [a, b] => format!("{a} and {b}"),
            [init @ .., last] => format!("{}, and {last}", init.join(", ")),
        };
        let mut out = format!("Your task is to do sequence labeling with labels {listed}.");
        if self.mode == SymbolMode::Se {
            for p in &self.pairs {
                let def = schema.get(&p.label).map(|d| d.definition.as_str()).unwrap_or_default();
                out.push_str(&format!("\n{}: {}", p.symbol, def));
            }
        }
        out
    }
}

pub fn symbolize_sentence(
    sentence: &AnnotatedSentence,
    mapping: &SymbolMapping,
) -> Result<AnnotatedSentence, SymbolError> {
    let spans = sentence
        .entities()
        .iter()
        .map(|s| {
            mapping
                .symbol_for(&s.label)
                .map(|sym| EntitySpan::new(s.start, s.end, sym))
                .ok_or_else(|| SymbolError::UnmappedLabel(s.label.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sentence.with_entities(spans)?)
}

pub fn desymbolize_sentence(
    sentence: &AnnotatedSentence,
    mapping: &SymbolMapping,
) -> Result<AnnotatedSentence, SymbolError> {
    let spans = sentence
        .entities()
        .iter()
        .map(|s| {
            mapping
                .label_for(&s.label)
                .map(|l| EntitySpan::new(s.start, s.end, l))
                .ok_or_else(|| SymbolError::UnmappedSymbol(s.label.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sentence.with_entities(spans)?)
}

/// Maps symbol labels back. Spans with an unknown symbol are dropped with an
/// `UnknownSymbol` warning.
pub fn desymbolize(parsed: &ParsedOutput, mapping: &SymbolMapping) -> ParsedOutput {
    let mut warnings = parsed.warnings().to_vec();
    let mut entities = Vec::with_capacity(parsed.entities().len());
    for s in parsed.entities() {
        match mapping.label_for(&s.label) {
            Some(l) => entities.push(EntitySpan::new(s.start, s.end, l)),
            None => warnings.push(
                ParseWarning::new(
                    WarningCode::UnknownSymbol,
                    format!("symbol {:?} has no label", s.label),
                    s.to_string(),
                )
                .with_label(&s.label),
            ),
        }
    }
    ParsedOutput::from_parts(entities, warnings)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolizedExample {
    pub id: String,
    pub instruction: String,
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolizedDataset {
    pub mapping: SymbolMapping,
    pub instruction: String,
    pub examples: Vec<SymbolizedExample>,
    /// The sentences with symbol labels.
    pub sentences: Vec<AnnotatedSentence>,
}

/// Rewrites a corpus with symbol labels; targets are inline XML over the
/// symbols.
pub fn symbolize_dataset(
    sentences: &[AnnotatedSentence],
    schema: &LabelSchema,
    mode: SymbolMode,
    alphabet: &str,
) -> Result<SymbolizedDataset, SymbolError> {
    let mapping = SymbolMapping::new(schema, mode, alphabet)?;
    let symbol_schema = mapping.symbol_schema(schema)?;
    let instruction = mapping.instruction(schema);
    let mut examples = Vec::with_capacity(sentences.len());
    let mut out_sentences = Vec::with_capacity(sentences.len());
    for s in sentences {
        let sym = symbolize_sentence(s, &mapping)?;
        examples.push(SymbolizedExample {
            id: s.id().to_string(),
            instruction: instruction.clone(),
            input: s.text().to_string(),
            output: encode_inline_xml(&symbol_schema, &sym)?,
        });
        out_sentences.push(sym);
    }
    Ok(SymbolizedDataset {
        mapping,
        instruction,
        examples,
        sentences: out_sentences,
    })
}
