use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A single feature value. Unavailable features are `Missing`, never a
/// fabricated number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureValue {
    Value(f64),
    Missing,
}

impl FeatureValue {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            FeatureValue::Value(v) => Some(v),
            FeatureValue::Missing => None,
        }
    }

    pub fn is_missing(self) -> bool {
        matches!(self, FeatureValue::Missing)
    }
}

/// Named feature values, unique by name. Non-finite numbers are stored as
/// `Missing`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NamedFeatureMap {
    entries: BTreeMap<String, FeatureValue>,
}

impl NamedFeatureMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        let value = if value.is_finite() {
            FeatureValue::Value(value)
        } else {
            FeatureValue::Missing
        };
        self.entries.insert(name.into(), value);
    }

    pub fn set_flag(&mut self, name: impl Into<String>, flag: bool) {
        self.set(name, if flag { 1.0 } else { 0.0 });
    }

    pub fn set_missing(&mut self, name: impl Into<String>) {
        self.entries.insert(name.into(), FeatureValue::Missing);
    }

    pub fn get(&self, name: &str) -> Option<FeatureValue> {
        self.entries.get(name).copied()
    }

    /// Numeric value of `name`, `None` when absent or missing.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(FeatureValue::as_f64)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, FeatureValue)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn all_missing(&self) -> bool {
        self.entries.values().all(|v| v.is_missing())
    }
}

impl FromIterator<(String, f64)> for NamedFeatureMap {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        let mut map = NamedFeatureMap::new();
        for (k, v) in iter {
            map.set(k, v);
        }
        map
    }
}
