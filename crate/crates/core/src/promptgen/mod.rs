//! Instruction prompts and symbol-label dataset variants.

mod symbolize;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use crate::codecs::OutputFormat;
use crate::model::LabelSchema;

pub use symbolize::{
    desymbolize, desymbolize_sentence, symbolize_dataset, symbolize_sentence, SymbolError, SymbolMapping, SymbolMode,
    SymbolizedDataset, SymbolizedExample, DEFAULT_ALPHABET,
};

const BUILTIN_DESCRIPTIONS: [(OutputFormat, &str); 5] = [
    (
        OutputFormat::InlineBracketed,
        include_str!("../../data/task_descriptions/inline-bracketed.txt"),
    ),
    (
        OutputFormat::InlineXml,
        include_str!("../../data/task_descriptions/inline-xml.txt"),
    ),
    (
        OutputFormat::CategoryJson,
        include_str!("../../data/task_descriptions/category-json.txt"),
    ),
    (
        OutputFormat::OccurrenceJson,
        include_str!("../../data/task_descriptions/occurrence-json.txt"),
    ),
    (
        OutputFormat::OffsetJson,
        include_str!("../../data/task_descriptions/offset-json.txt"),
    ),
];

/// Task description, label block and input preamble, joined by blank lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub task_descriptions: BTreeMap<OutputFormat, String>,
    pub label_block_header: String,
    pub input_preamble: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self {
            task_descriptions: BUILTIN_DESCRIPTIONS
                .iter()
                .map(|(f, d)| (*f, d.trim_end().to_string()))
                .collect(),
            label_block_header: "Label Set:".to_string(),
            input_preamble: "Now process the input sentence:".to_string(),
        }
    }
}

impl PromptTemplate {
    /// Replaces task descriptions with `<format>.txt` files found in `dir`.
    /// Formats without a file keep the built-in text.
    pub fn with_descriptions_from(mut self, dir: impl AsRef<Path>) -> io::Result<Self> {
        for format in OutputFormat::ALL {
            let path = dir.as_ref().join(format!("{format}.txt"));
            match fs::read_to_string(&path) {
                Ok(text) => {
                    self.task_descriptions.insert(format, text.trim_end().to_string());
                }
                Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                Err(e) => return Err(e),
            }
        }
        Ok(self)
    }

    pub fn task_description(&self, format: OutputFormat) -> &str {
        self.task_descriptions
            .get(&format)
            .map(String::as_str)
            .unwrap_or_default()
    }

    pub fn build(&self, format: OutputFormat, schema: &LabelSchema) -> String {
        let mut out = String::new();
        out.push_str(self.task_description(format));
        out.push_str("\n\n");
        out.push_str(&self.label_block_header);
        out.push('\n');
        out.push_str(&label_block(schema));
        out.push_str("\n\n");
        out.push_str(&self.input_preamble);
        out
    }
}

/// One `ID(name): definition` line per label, in schema order.
pub fn label_block(schema: &LabelSchema) -> String {
    schema
        .labels()
        .iter()
        .map(|l| match &l.display_name {
            Some(name) => format!("{}({}): {}", l.id, name, l.definition),
            None => format!("{}: {}", l.id, l.definition),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// The instruction for `format` with the built-in template.
pub fn build_instruction(format: OutputFormat, schema: &LabelSchema) -> String {
    PromptTemplate::default().build(format, schema)
}

/// Instruction followed by the sentence on its own line.
pub fn render_prompt(format: OutputFormat, schema: &LabelSchema, sentence: &str) -> String {
    format!("{}\n{}", build_instruction(format, schema), sentence)
}
