//! Schema-ordered feature vectors built from lexical, content and external
//! feature maps.

mod assemble;
mod content;
mod providers;
mod registry;
mod schema;

pub use assemble::{
    assemble_feature_vector, AssembleError, FeatureVector, Imputation, MISSING_SENTINEL,
};
pub use content::{extract_content_features, CONTENT_FEATURES};
pub use providers::{
    query_external_features, ContentStub, FeatureProvider, ProviderConfig, ProviderError,
    ProviderOutcome, ProviderReport, SearchStub, WhoisStub, CONTENT_STUB_ID, SEARCH_STUB_ID,
    WHOIS_STUB_ID,
};
pub use registry::{group_of, FeatureGroup, FEATURE_REGISTRY, IDENTIFIER_COLUMNS};
pub use schema::{
    load_schema_from_dataset, DatasetLayout, FeatureSchema, SchemaColumn, SchemaError,
};
