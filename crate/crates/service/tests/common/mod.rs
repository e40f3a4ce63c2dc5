use std::path::PathBuf;

use threatlens_core::bundle::{GbdtEntry, NbEntry};
use threatlens_core::dataset::{load_phishing_csv, load_spam_csv};
use threatlens_core::learners::GbdtConfig;
use threatlens_core::pipeline::{train_phishing, train_spam};
use threatlens_core::ModelBundle;

pub fn samples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/samples")
}

/// Both models trained on the bundled 20-row samples.
pub fn sample_bundle() -> ModelBundle {
    let spam = load_spam_csv(&samples_dir().join("spam_sample.csv")).unwrap();
    let nb = train_spam(&spam, 0.8, 42, 1.0).unwrap();
    let phishing = load_phishing_csv(&samples_dir().join("phishing_sample.csv")).unwrap();
    let config = GbdtConfig {
        n_trees: 10,
        min_samples_leaf: 1,
        max_leaves: 4,
        ..GbdtConfig::default()
    };
    let gbdt = train_phishing(&phishing, 0.8, 42, &config).unwrap();
    ModelBundle {
        nb: Some(NbEntry {
            model: nb.model,
            metrics: Some(nb.metrics),
        }),
        gbdt: Some(GbdtEntry {
            model: gbdt.model,
            config: Some(config),
            metrics: Some(gbdt.metrics),
        }),
        ..ModelBundle::new(1_700_000_000_000)
    }
}
