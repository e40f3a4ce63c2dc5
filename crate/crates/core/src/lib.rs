//! Core engine for threatlens: URL parsing and feature extraction, feature
//! enrichment, the spam text pipeline, the learners (multinomial naive Bayes
//! and gradient-boosted trees), HTTP log analysis and model bundles.

pub mod api;
pub mod bundle;
pub mod clock;
pub mod dataset;
pub mod engine;
pub mod enrichment;
pub mod learners;
pub mod logs;
pub mod pipeline;
pub mod text;
pub mod url_model;

pub use bundle::{load_model_bundle, save_model_bundle, BundleError, ModelBundle};
pub use engine::{Engine, EngineError, EngineOptions};
