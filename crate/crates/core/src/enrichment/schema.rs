use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::registry::{group_of, FeatureGroup, IDENTIFIER_COLUMNS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("empty header")]
    EmptyHeader,
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("label column {0:?} not in header")]
    MissingLabelColumn(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaColumn {
    pub name: String,
    pub group: FeatureGroup,
}

/// Ordered feature columns. The version is derived from the column names so
/// two schemas with the same columns in the same order share a version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub version: String,
    pub columns: Vec<SchemaColumn>,
}

impl FeatureSchema {
    pub fn new(name: impl Into<String>, column_names: &[&str]) -> Result<Self, SchemaError> {
        let mut seen = HashSet::new();
        for c in column_names {
            if !seen.insert(*c) {
                return Err(SchemaError::DuplicateColumn(c.to_string()));
            }
        }
        let columns: Vec<SchemaColumn> = column_names
            .iter()
            .map(|n| SchemaColumn {
                name: n.to_string(),
                group: group_of(n),
            })
            .collect();
        Ok(Self {
            name: name.into(),
            version: schema_version(&columns),
            columns,
        })
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }
}

fn schema_version(columns: &[SchemaColumn]) -> String {
    let mut h = Sha256::new();
    for c in columns {
        h.update(c.name.as_bytes());
        h.update([0u8]);
    }
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// How a dataset header maps onto a feature schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetLayout {
    pub schema: FeatureSchema,
    pub label_index: usize,
    pub identifier_index: Option<usize>,
    /// Header position of each schema column, in schema order.
    pub feature_indices: Vec<usize>,
}

/// Build the schema from a dataset header: every column except the label and
/// identifier columns (the raw URL), in header order.
pub fn load_schema_from_dataset(
    header: &[impl AsRef<str>],
    label_column: &str,
) -> Result<DatasetLayout, SchemaError> {
    if header.is_empty() {
        return Err(SchemaError::EmptyHeader);
    }
    let names: Vec<&str> = header.iter().map(|h| h.as_ref().trim()).collect();
    let mut seen = HashSet::new();
    for n in &names {
        if !seen.insert(*n) {
            return Err(SchemaError::DuplicateColumn(n.to_string()));
        }
    }
    let label_index = names
        .iter()
        .position(|n| *n == label_column)
        .ok_or_else(|| SchemaError::MissingLabelColumn(label_column.to_string()))?;
    let identifier_index = names.iter().position(|n| IDENTIFIER_COLUMNS.contains(n));
    let feature_indices: Vec<usize> = (0..names.len())
        .filter(|&i| i != label_index && Some(i) != identifier_index)
        .collect();
    let feature_names: Vec<&str> = feature_indices.iter().map(|&i| names[i]).collect();
    Ok(DatasetLayout {
        schema: FeatureSchema::new("phishing-url", &feature_names)?,
        label_index,
        identifier_index,
        feature_indices,
    })
}
