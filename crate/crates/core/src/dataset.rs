//! CSV ingestion for the two training corpora.
//!
//! Spam: header row, then `label,text`; labels `ham`/`spam`; trailing columns
//! are ignored. Phishing: header row naming every column, numeric feature
//! cells, a raw-URL column and a `legitimate`/`phishing` label column.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enrichment::{
    load_schema_from_dataset, FeatureSchema, FeatureVector, SchemaError, MISSING_SENTINEL,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: expected at least {expected} columns, found {found}")]
    ShortRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unknown label {value:?}")]
    UnknownLabel { line: u64, value: String },
    #[error("line {line}: column {column:?} is not numeric: {value:?}")]
    NonNumeric {
        line: u64,
        column: String,
        value: String,
    },
    #[error("dataset has no rows")]
    Empty,
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpamLabel {
    Ham,
    Spam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UrlLabel {
    Legitimate,
    Phishing,
}

impl FromStr for SpamLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ham" => Ok(Self::Ham),
            "spam" => Ok(Self::Spam),
            other => Err(other.to_string()),
        }
    }
}

impl FromStr for UrlLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "legitimate" => Ok(Self::Legitimate),
            "phishing" => Ok(Self::Phishing),
            other => Err(other.to_string()),
        }
    }
}

impl fmt::Display for SpamLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ham => "ham",
            Self::Spam => "spam",
        })
    }
}

impl fmt::Display for UrlLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Legitimate => "legitimate",
            Self::Phishing => "phishing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextRow {
    pub text: String,
    pub label: SpamLabel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledTextDataset {
    pub rows: Vec<TextRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub vector: FeatureVector,
    pub label: UrlLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatureDataset {
    pub schema: FeatureSchema,
    pub rows: Vec<FeatureRow>,
    /// Raw URLs, parallel to `rows`, when the file has a URL column.
    pub identifiers: Option<Vec<String>>,
}

impl LabeledFeatureDataset {
    /// Dataset from plain value rows; every row must match the schema length.
    pub fn from_rows(
        schema: FeatureSchema,
        rows: Vec<(Vec<f64>, UrlLabel)>,
    ) -> Result<Self, DatasetError> {
        if rows.is_empty() {
            return Err(DatasetError::Empty);
        }
        let mut out = Vec::with_capacity(rows.len());
        for (i, (values, label)) in rows.into_iter().enumerate() {
            if values.len() != schema.len() {
                return Err(DatasetError::ShortRow {
                    line: i as u64 + 1,
                    expected: schema.len(),
                    found: values.len(),
                });
            }
            out.push(FeatureRow {
                vector: FeatureVector::from_values(schema.version.clone(), values),
                label,
            });
        }
        Ok(Self {
            schema,
            rows: out,
            identifiers: None,
        })
    }

    /// Subset of rows by index, keeping schema and identifiers aligned.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            identifiers: self
                .identifiers
                .as_ref()
                .map(|ids| indices.iter().map(|&i| ids[i].clone()).collect()),
        }
    }
}

fn open(path: &Path) -> Result<File, DatasetError> {
    File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn line_of(record: &csv::ByteRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

pub fn load_spam_csv(path: &Path) -> Result<LabeledTextDataset, DatasetError> {
    read_spam_csv(open(path)?)
}

/// Invalid UTF-8 is replaced rather than rejected; the public SMS corpus
/// ships in Latin-1.
pub fn read_spam_csv(reader: impl Read) -> Result<LabeledTextDataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in rdr.byte_records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() < 2 {
            return Err(DatasetError::ShortRow {
                line,
                expected: 2,
                found: record.len(),
            });
        }
        let raw_label = String::from_utf8_lossy(&record[0]);
        let label = raw_label
            .parse::<SpamLabel>()
            .map_err(|value| DatasetError::UnknownLabel { line, value })?;
        rows.push(TextRow {
            text: String::from_utf8_lossy(&record[1]).into_owned(),
            label,
        });
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(LabeledTextDataset { rows })
}

pub const PHISHING_LABEL_COLUMN: &str = "status";

pub fn load_phishing_csv(path: &Path) -> Result<LabeledFeatureDataset, DatasetError> {
    read_phishing_csv(open(path)?, PHISHING_LABEL_COLUMN)
}

/// Empty cells are imputed with the sentinel and flagged in the mask.
pub fn read_phishing_csv(
    reader: impl Read,
    label_column: &str,
) -> Result<LabeledFeatureDataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .byte_headers()?
        .iter()
        .map(|h| String::from_utf8_lossy(h).into_owned())
        .collect();
    let layout = load_schema_from_dataset(&header, label_column)?;
    let mut rows = Vec::new();
    let mut identifiers = layout.identifier_index.map(|_| Vec::new());
    for record in rdr.byte_records() {
        let record = record?;
        let line = line_of(&record);
        let cell = |i: usize| String::from_utf8_lossy(&record[i]).trim().to_string();
        let label = cell(layout.label_index)
            .parse::<UrlLabel>()
            .map_err(|value| DatasetError::UnknownLabel { line, value })?;
        let mut values = Vec::with_capacity(layout.feature_indices.len());
        let mut imputed_mask = Vec::with_capacity(layout.feature_indices.len());
        for (col, &i) in layout.feature_indices.iter().enumerate() {
            let raw = cell(i);
            if raw.is_empty() {
                values.push(MISSING_SENTINEL);
                imputed_mask.push(true);
                continue;
            }
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => {
                    values.push(v);
                    imputed_mask.push(false);
                }
                _ => {
                    return Err(DatasetError::NonNumeric {
                        line,
                        column: layout.schema.columns[col].name.clone(),
                        value: raw,
                    })
                }
            }
        }
        if let (Some(ids), Some(i)) = (identifiers.as_mut(), layout.identifier_index) {
            ids.push(cell(i));
        }
        rows.push(FeatureRow {
            vector: FeatureVector {
                schema_version: layout.schema.version.clone(),
                values,
                imputed_mask,
            },
            label,
        });
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(LabeledFeatureDataset {
        schema: layout.schema,
        rows,
        identifiers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spam_with_extra_columns_and_latin1() {
        let data = b"v1,v2,,,\nham,hello there,,,\nspam,\"WIN \xa31000, now\",,,\n";
        let ds = read_spam_csv(&data[..]).unwrap();
        assert_eq!(ds.rows.len(), 2);
        assert_eq!(ds.rows[0].label, SpamLabel::Ham);
        assert_eq!(ds.rows[1].label, SpamLabel::Spam);
        assert!(ds.rows[1].text.starts_with("WIN "));
        assert!(ds.rows[1].text.ends_with("1000, now"));
    }

    #[test]
    fn spam_errors() {
        assert!(matches!(
            read_spam_csv(&b"label,text\nmaybe,hi\n"[..]),
            Err(DatasetError::UnknownLabel { .. })
        ));
        assert!(matches!(
            read_spam_csv(&b"label,text\n"[..]),
            Err(DatasetError::Empty)
        ));
        assert!(matches!(
            read_spam_csv(&b"label,text\nham\n"[..]),
            Err(DatasetError::ShortRow { .. })
        ));
    }

    #[test]
    fn phishing_rows() {
        let data = "url,length_url,nb_dots,status\n\
                    http://a.com,12,1,legitimate\n\
                    http://b.tk/x,13,,phishing\n";
        let ds = read_phishing_csv(data.as_bytes(), "status").unwrap();
        assert_eq!(ds.schema.len(), 2);
        assert_eq!(ds.rows[0].vector.values, [12.0, 1.0]);
        assert_eq!(ds.rows[1].vector.values, [13.0, -1.0]);
        assert_eq!(ds.rows[1].vector.imputed_mask, [false, true]);
        assert_eq!(ds.rows[1].label, UrlLabel::Phishing);
        assert_eq!(ds.identifiers.unwrap(), ["http://a.com", "http://b.tk/x"]);
    }

    #[test]
    fn phishing_errors() {
        let bad = "url,length_url,status\nhttp://a.com,abc,legitimate\n";
        assert!(matches!(
            read_phishing_csv(bad.as_bytes(), "status"),
            Err(DatasetError::NonNumeric { .. })
        ));
        let nolabel = "url,length_url\nhttp://a.com,1\n";
        assert!(matches!(
            read_phishing_csv(nolabel.as_bytes(), "status"),
            Err(DatasetError::Schema(SchemaError::MissingLabelColumn(_)))
        ));
    }

    #[test]
    fn sample_files_parse() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/samples");
        let spam = load_spam_csv(&root.join("spam_sample.csv")).unwrap();
        assert_eq!(spam.rows.len(), 20);
        let ph = load_phishing_csv(&root.join("phishing_sample.csv")).unwrap();
        assert_eq!(ph.rows.len(), 20);
        assert_eq!(ph.schema.len(), 87);
    }
}
