use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Characters that may not appear in a label id, because the inline codecs
/// use them as markup.
const RESERVED: &[char] = &['[', ']', '|', '<', '>', '/', '\\'];

/// Current version of the on-disk schema format.
pub const SCHEMA_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDef {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    #[serde(default)]
    pub definition: String,
}

impl LabelDef {
    pub fn new(id: impl Into<String>, definition: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            display_name: None,
            definition: definition.into(),
        }
    }

    pub fn with_display_name(mut self, name: impl Into<String>) -> Self {
        self.display_name = Some(name.into());
        self
    }
}

/// Ordered label set for one dataset.
///
/// The order is significant: category-grouped JSON keys, prompt label blocks
/// and symbol assignment all follow it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSchema {
    dataset_name: String,
    labels: Vec<LabelDef>,
}

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    #[serde(default = "default_version")]
    version: u32,
    dataset: String,
    labels: Vec<LabelDef>,
}

fn default_version() -> u32 {
    SCHEMA_FORMAT_VERSION
}

/// Names of the schemas bundled with the crate.
pub const BUILTIN_SCHEMAS: [&str; 4] = ["conll2003", "ontonotes5", "genia", "ace2005"];

impl LabelSchema {
    pub fn new(dataset_name: impl Into<String>, labels: Vec<LabelDef>) -> Result<Self, ModelError> {
        if labels.is_empty() {
            return Err(ModelError::EmptySchema);
        }
        let mut seen = HashSet::new();
        for def in &labels {
            validate_label_id(&def.id)?;
            if !seen.insert(def.id.as_str()) {
                return Err(ModelError::DuplicateLabel(def.id.clone()));
            }
        }
        Ok(Self {
            dataset_name: dataset_name.into(),
            labels,
        })
    }

    /// Parses the versioned JSON schema format.
    pub fn from_json_str(json: &str) -> Result<Self, ModelError> {
        let file: SchemaFile = serde_json::from_str(json).map_err(|e| ModelError::SchemaFormat(e.to_string()))?;
        if file.version != SCHEMA_FORMAT_VERSION {
            return Err(ModelError::SchemaFormat(format!(
                "unsupported schema version {}",
                file.version
            )));
        }
        Self::new(file.dataset, file.labels)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let json =
            std::fs::read_to_string(path).map_err(|e| ModelError::SchemaFormat(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&json)
    }

    pub fn to_json_string(&self) -> String {
        let file = SchemaFile {
            version: SCHEMA_FORMAT_VERSION,
            dataset: self.dataset_name.clone(),
            labels: self.labels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("schema serializes")
    }

    /// One of the bundled schemas (see [`BUILTIN_SCHEMAS`]). Names are matched
    /// case-insensitively and ignore `-`, `_` and `.`.
    pub fn builtin(name: &str) -> Option<Self> {
        let key: String = name
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | '.'))
            .flat_map(char::to_lowercase)
            .collect();
        let json = match key.as_str() {
            "conll2003" | "conll" => include_str!("../../data/schemas/conll2003.json"),
            "ontonotes5" | "ontonotes50" | "ontonotes" => {
                include_str!("../../data/schemas/ontonotes5.json")
            }
            "genia" => include_str!("../../data/schemas/genia.json"),
            "ace2005" | "ace05" | "ace" => include_str!("../../data/schemas/ace2005.json"),
            _ => return None,
        };
        Some(Self::from_json_str(json).expect("bundled schema is valid"))
    }

    pub fn dataset_name(&self) -> &str {
        &self.dataset_name
    }

    pub fn labels(&self) -> &[LabelDef] {
        &self.labels
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(|l| l.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.rank(label).is_some()
    }

    /// Position of `label` in schema order.
    pub fn rank(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.id == label)
    }

    pub fn get(&self, label: &str) -> Option<&LabelDef> {
        self.labels.iter().find(|l| l.id == label)
    }
}

/// Label ids are non-empty and free of whitespace and inline markup characters.
pub fn is_valid_label_id(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c))
}

pub(crate) fn validate_label_id(id: &str) -> Result<(), ModelError> {
    if !is_valid_label_id(id) {
        return Err(ModelError::InvalidLabel(id.to_string()));
    }
    Ok(())
}
