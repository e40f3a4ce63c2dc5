//! Versioned model bundles: one JSON document holding the feature schema,
//! the vocabulary, both models and their held-out metrics, sealed by a
//! SHA-256 checksum over the canonical serialization of everything else.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clock::{Clock, SystemClock};
use crate::dataset::SpamLabel;
use crate::enrichment::FeatureSchema;
use crate::learners::{GbdtConfig, GbdtModel, MetricsReport, NbModel, Tree};
use crate::text::Vocabulary;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("bundle I/O failed: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("bundle format version {found} is newer than supported version {supported}")]
    UnsupportedFormatVersion { found: u64, supported: u32 },
    #[error("corrupt bundle: {0}")]
    CorruptBundle(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbEntry {
    pub model: NbModel,
    pub metrics: Option<MetricsReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbdtEntry {
    pub model: GbdtModel,
    pub config: Option<GbdtConfig>,
    pub metrics: Option<MetricsReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub format_version: u32,
    /// Epoch milliseconds.
    pub created_at: i64,
    pub nb: Option<NbEntry>,
    pub gbdt: Option<GbdtEntry>,
}

impl Default for ModelBundle {
    fn default() -> Self {
        Self {
            format_version: FORMAT_VERSION,
            created_at: SystemClock.now_ms(),
            nb: None,
            gbdt: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NbDoc {
    classes: Vec<SpamLabel>,
    log_priors: Vec<f64>,
    log_likelihoods: Vec<Vec<f64>>,
    alpha: f64,
    metrics: Option<MetricsReport>,
}

#[derive(Serialize, Deserialize)]
struct GbdtDoc {
    base_score: f64,
    learning_rate: f64,
    trees: Vec<Tree>,
    config: Option<GbdtConfig>,
    metrics: Option<MetricsReport>,
}

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    format_version: u32,
    created_at: i64,
    schema: Option<FeatureSchema>,
    vocabulary: Option<Vocabulary>,
    nb: Option<NbDoc>,
    gbdt: Option<GbdtDoc>,
}

impl ModelBundle {
    pub fn new(created_at: i64) -> Self {
        Self {
            created_at,
            ..Self::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nb.is_none() && self.gbdt.is_none()
    }

    pub fn schema(&self) -> Option<&FeatureSchema> {
        self.gbdt.as_ref().map(|g| &g.model.schema)
    }

    pub fn vocabulary(&self) -> Option<&Vocabulary> {
        self.nb.as_ref().map(|n| &n.model.vocabulary)
    }

    /// Kinds of model present, in a fixed order.
    pub fn models_loaded(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.nb.is_some() {
            v.push("nb");
        }
        if self.gbdt.is_some() {
            v.push("gbdt");
        }
        v
    }

    /// Keep this bundle's models, filling absent ones from `older`.
    pub fn merge_over(mut self, older: ModelBundle) -> Self {
        if self.nb.is_none() {
            self.nb = older.nb;
        }
        if self.gbdt.is_none() {
            self.gbdt = older.gbdt;
        }
        self
    }

    fn to_doc(&self) -> BundleDoc {
        BundleDoc {
            format_version: self.format_version,
            created_at: self.created_at,
            schema: self.schema().cloned(),
            vocabulary: self.vocabulary().cloned(),
            nb: self.nb.as_ref().map(|e| NbDoc {
                classes: e.model.classes.clone(),
                log_priors: e.model.log_priors.clone(),
                log_likelihoods: e.model.log_likelihoods.clone(),
                alpha: e.model.alpha,
                metrics: e.metrics,
            }),
            gbdt: self.gbdt.as_ref().map(|e| GbdtDoc {
                base_score: e.model.base_score,
                learning_rate: e.model.learning_rate,
                trees: e.model.trees.clone(),
                config: e.config.clone(),
                metrics: e.metrics,
            }),
        }
    }

    fn from_doc(doc: BundleDoc) -> Result<Self, BundleError> {
        let corrupt = |m: &str| BundleError::CorruptBundle(m.to_string());
        let nb = match doc.nb {
            None => None,
            Some(d) => {
                let vocabulary = doc
                    .vocabulary
                    .clone()
                    .ok_or_else(|| corrupt("nb model without vocabulary"))?;
                if d.log_likelihoods.len() != d.classes.len()
                    || d.log_priors.len() != d.classes.len()
                    || d.log_likelihoods.iter().any(|r| r.len() != vocabulary.len())
                {
                    return Err(corrupt("nb model does not match its vocabulary"));
                }
                Some(NbEntry {
                    model: NbModel {
                        classes: d.classes,
                        log_priors: d.log_priors,
                        log_likelihoods: d.log_likelihoods,
                        vocabulary,
                        alpha: d.alpha,
                    },
                    metrics: d.metrics,
                })
            }
        };
        let gbdt = match doc.gbdt {
            None => None,
            Some(d) => {
                let schema = doc
                    .schema
                    .clone()
                    .ok_or_else(|| corrupt("gbdt model without schema"))?;
                let model = GbdtModel {
                    schema,
                    base_score: d.base_score,
                    learning_rate: d.learning_rate,
                    trees: d.trees,
                };
                model
                    .validate()
                    .map_err(|e| BundleError::CorruptBundle(e.to_string()))?;
                Some(GbdtEntry {
                    model,
                    config: d.config,
                    metrics: d.metrics,
                })
            }
        };
        if nb.is_none() && gbdt.is_none() {
            return Err(corrupt("bundle holds no model"));
        }
        Ok(Self {
            format_version: doc.format_version,
            created_at: doc.created_at,
            nb,
            gbdt,
        })
    }

    fn canonical_value(&self) -> Result<Value, BundleError> {
        serde_json::to_value(self.to_doc()).map_err(|e| BundleError::InvalidBundle(e.to_string()))
    }

    /// Hex SHA-256 of the canonical serialization (sorted keys, compact).
    pub fn checksum(&self) -> Result<String, BundleError> {
        Ok(checksum_of(&self.canonical_value()?))
    }
}

fn checksum_of(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("a JSON value always serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Serialize the bundle with its checksum.
pub fn bundle_to_string(bundle: &ModelBundle) -> Result<String, BundleError> {
    if bundle.is_empty() {
        return Err(BundleError::InvalidBundle("bundle holds no model".into()));
    }
    let mut value = bundle.canonical_value()?;
    let sum = checksum_of(&value);
    value
        .as_object_mut()
        .expect("bundle serializes as an object")
        .insert("checksum".into(), Value::String(sum));
    serde_json::to_string_pretty(&value).map_err(|e| BundleError::InvalidBundle(e.to_string()))
}

pub fn bundle_from_str(text: &str) -> Result<ModelBundle, BundleError> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| BundleError::CorruptBundle(e.to_string()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| BundleError::CorruptBundle("top level is not an object".into()))?;
    let version = obj
        .get("format_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| BundleError::CorruptBundle("missing format_version".into()))?;
    if version > FORMAT_VERSION as u64 || version == 0 {
        return Err(BundleError::UnsupportedFormatVersion {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let stored = match obj.remove("checksum") {
        Some(Value::String(s)) => s,
        _ => return Err(BundleError::CorruptBundle("missing checksum".into())),
    };
    if checksum_of(&value) != stored {
        return Err(BundleError::CorruptBundle("checksum mismatch".into()));
    }
    let doc: BundleDoc =
        serde_json::from_value(value).map_err(|e| BundleError::CorruptBundle(e.to_string()))?;
    ModelBundle::from_doc(doc)
}

/// Write atomically: a sibling temp file is renamed over `path`.
pub fn save_model_bundle(bundle: &ModelBundle, path: &Path) -> Result<(), BundleError> {
    let text = bundle_to_string(bundle)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_model_bundle(path: &Path) -> Result<ModelBundle, BundleError> {
    bundle_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::Node;
    use crate::text::TermCountVector;

    pub(crate) fn tiny_bundle() -> ModelBundle {
        let vocabulary = Vocabulary::from_terms(vec!["win".into(), "cash".into()]).unwrap();
        let nb = NbModel {
            classes: vec![SpamLabel::Ham, SpamLabel::Spam],
            log_priors: vec![0.6f64.ln(), 0.4f64.ln()],
            log_likelihoods: vec![
                vec![0.7f64.ln(), 0.3f64.ln()],
                vec![0.2f64.ln(), 0.8f64.ln()],
            ],
            vocabulary,
            alpha: 1.0,
        };
        let schema = FeatureSchema::new("t", &["a", "b"]).unwrap();
        let gbdt = GbdtModel {
            schema,
            base_score: -0.1,
            learning_rate: 0.1,
            trees: vec![Tree {
                nodes: vec![
                    Node::Split {
                        feature: 1,
                        threshold: 0.5,
                        left: 1,
                        right: 2,
                        default_left: false,
                    },
                    Node::Leaf { value: -0.3 },
                    Node::Leaf { value: 0.7 },
                ],
            }],
        };
        ModelBundle {
            format_version: FORMAT_VERSION,
            created_at: 1_700_000_000_000,
            nb: Some(NbEntry {
                model: nb,
                metrics: None,
            }),
            gbdt: Some(GbdtEntry {
                model: gbdt,
                config: Some(GbdtConfig::default()),
                metrics: Some(MetricsReport::from_counts(3, 1, 4, 0, 0.9)),
            }),
        }
    }

    #[test]
    fn round_trip_is_identical() {
        let b = tiny_bundle();
        let text = bundle_to_string(&b).unwrap();
        let back = bundle_from_str(&text).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.checksum().unwrap(), b.checksum().unwrap());
        let mut v = TermCountVector::new(2);
        v.add(1, 2);
        let nb = &back.nb.unwrap().model;
        assert_eq!(
            crate::learners::nb_predict(nb, &v).unwrap(),
            crate::learners::nb_predict(&b.nb.unwrap().model, &v).unwrap()
        );
    }

    #[test]
    fn top_level_keys() {
        let text = bundle_to_string(&tiny_bundle()).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(
            keys,
            ["checksum", "created_at", "format_version", "gbdt", "nb", "schema", "vocabulary"]
        );
    }

    #[test]
    fn future_version_rejected() {
        let text = bundle_to_string(&tiny_bundle()).unwrap();
        let mut v: Value = serde_json::from_str(&text).unwrap();
        v["format_version"] = Value::from(FORMAT_VERSION + 1);
        assert!(matches!(
            bundle_from_str(&v.to_string()),
            Err(BundleError::UnsupportedFormatVersion { found: 2, .. })
        ));
    }

    #[test]
    fn truncated_or_tampered_is_corrupt() {
        let text = bundle_to_string(&tiny_bundle()).unwrap();
        assert!(matches!(
            bundle_from_str(&text[..text.len() / 2]),
            Err(BundleError::CorruptBundle(_))
        ));
        let tampered = text.replacen("-0.3", "-0.31", 1);
        assert_ne!(tampered, text);
        assert!(matches!(
            bundle_from_str(&tampered),
            Err(BundleError::CorruptBundle(_))
        ));
    }

    #[test]
    fn file_round_trip_and_io_failure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bundle.json");
        save_model_bundle(&tiny_bundle(), &path).unwrap();
        assert_eq!(load_model_bundle(&path).unwrap(), tiny_bundle());
        assert!(matches!(
            load_model_bundle(&dir.path().join("missing.json")),
            Err(BundleError::IoFailure(_))
        ));
    }

    #[test]
    fn empty_bundle_cannot_be_saved() {
        assert!(matches!(
            bundle_to_string(&ModelBundle::new(1)),
            Err(BundleError::InvalidBundle(_))
        ));
    }

    #[test]
    fn merge_keeps_newer_models() {
        let full = tiny_bundle();
        let mut only_nb = ModelBundle::new(5);
        only_nb.nb = full.nb.clone().map(|mut e| {
            e.model.alpha = 2.0;
            e
        });
        let merged = only_nb.merge_over(full.clone());
        assert_eq!(merged.nb.unwrap().model.alpha, 2.0);
        assert_eq!(merged.gbdt, full.gbdt);
        assert_eq!(merged.created_at, 5);
    }
}
