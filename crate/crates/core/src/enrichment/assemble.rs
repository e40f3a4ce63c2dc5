use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::schema::FeatureSchema;
use crate::url_model::{FeatureValue, NamedFeatureMap};

/// Value written for unavailable features. Counts and ratios are never
/// negative, so it cannot collide with an extracted value.
pub const MISSING_SENTINEL: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Imputation {
    Sentinel(f64),
}

impl Default for Imputation {
    fn default() -> Self {
        Imputation::Sentinel(MISSING_SENTINEL)
    }
}

impl Imputation {
    fn value(self) -> f64 {
        match self {
            Imputation::Sentinel(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssembleError {
    #[error("feature {name:?} has conflicting values {first} and {second}")]
    ConflictingFeatureValue { name: String, first: f64, second: f64 },
}

/// Schema-ordered feature values. `imputed_mask[i]` marks values that came
/// from imputation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub schema_version: String,
    pub values: Vec<f64>,
    pub imputed_mask: Vec<bool>,
}

impl FeatureVector {
    /// A fully observed vector; non-finite inputs are replaced by the
    /// sentinel and marked imputed.
    pub fn from_values(schema_version: impl Into<String>, values: Vec<f64>) -> Self {
        let imputed_mask = values.iter().map(|v| !v.is_finite()).collect();
        let values = values
            .into_iter()
            .map(|v| if v.is_finite() { v } else { MISSING_SENTINEL })
            .collect();
        Self {
            schema_version: schema_version.into(),
            values,
            imputed_mask,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn imputed_count(&self) -> usize {
        self.imputed_mask.iter().filter(|&&m| m).count()
    }
}

/// Merge `maps` and lay the result out in schema order. Columns absent from
/// every map, or only present as missing, receive the imputation value.
pub fn assemble_feature_vector(
    schema: &FeatureSchema,
    maps: &[&NamedFeatureMap],
    imputation: Imputation,
) -> Result<FeatureVector, AssembleError> {
    let mut merged: HashMap<&str, f64> = HashMap::new();
    for map in maps {
        for (name, value) in map.iter() {
            let FeatureValue::Value(v) = value else {
                continue;
            };
            match merged.get(name) {
                Some(&prev) if prev.to_bits() != v.to_bits() => {
                    let (first, second) = if prev.total_cmp(&v).is_le() {
                        (prev, v)
                    } else {
                        (v, prev)
                    };
                    return Err(AssembleError::ConflictingFeatureValue {
                        name: name.to_string(),
                        first,
                        second,
                    });
                }
                Some(_) => {}
                None => {
                    merged.insert(name, v);
                }
            }
        }
    }

    let fill = imputation.value();
    let mut values = Vec::with_capacity(schema.len());
    let mut imputed_mask = Vec::with_capacity(schema.len());
    for name in schema.column_names() {
        match merged.get(name) {
            Some(&v) => {
                values.push(v);
                imputed_mask.push(false);
            }
            None => {
                values.push(fill);
                imputed_mask.push(true);
            }
        }
    }
    Ok(FeatureVector {
        schema_version: schema.version.clone(),
        values,
        imputed_mask,
    })
}
