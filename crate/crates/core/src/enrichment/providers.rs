//! External feature providers. Live registration-record, search-index and
//! page-fetch clients plug in through [`FeatureProvider`]; the crate ships
//! deterministic stubs keyed by `(seed, provider id, host)` so nothing here
//! touches the network.

use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use futures::future::join_all;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::content::{extract_content_features, CONTENT_FEATURES};
use crate::url_model::{NamedFeatureMap, UrlParts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    #[error("provider {id} failed: {message}")]
    Failed { id: String, message: String },
    #[error("no providers given")]
    NoProviders,
    #[error("timeout must be positive")]
    ZeroTimeout,
    #[error("unknown provider id {0:?}")]
    UnknownProvider(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderOutcome {
    Ok,
    Timeout,
    Error,
    Stubbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderReport {
    pub provider_id: String,
    pub features: NamedFeatureMap,
    pub latency_ms: u64,
    pub outcome: ProviderOutcome,
}

#[async_trait]
pub trait FeatureProvider: Send + Sync {
    fn id(&self) -> &str;

    /// Names this provider can fill. Used to mark them missing on failure.
    fn feature_names(&self) -> Vec<&'static str>;

    /// Whether results are synthetic.
    fn is_stub(&self) -> bool {
        false
    }

    async fn fetch(&self, parts: &UrlParts) -> Result<NamedFeatureMap, ProviderError>;
}

fn all_missing(names: &[&'static str]) -> NamedFeatureMap {
    let mut m = NamedFeatureMap::new();
    for n in names {
        m.set_missing(*n);
    }
    m
}

/// Query every provider concurrently, each bounded by `timeout`. Failures are
/// reported per provider, never as an error of the whole call.
pub async fn query_external_features(
    parts: &UrlParts,
    providers: &[Arc<dyn FeatureProvider>],
    timeout: Duration,
) -> Result<Vec<ProviderReport>, ProviderError> {
    if providers.is_empty() {
        return Err(ProviderError::NoProviders);
    }
    if timeout.is_zero() {
        return Err(ProviderError::ZeroTimeout);
    }
    let calls = providers.iter().map(|p| async move {
        let start = tokio::time::Instant::now();
        let result = tokio::time::timeout(timeout, p.fetch(parts)).await;
        let latency_ms = start.elapsed().as_millis() as u64;
        let (features, outcome) = match result {
            Ok(Ok(features)) if p.is_stub() => (features, ProviderOutcome::Stubbed),
            Ok(Ok(features)) => (features, ProviderOutcome::Ok),
            Ok(Err(e)) => {
                tracing::debug!(provider = p.id(), error = %e, "provider failed");
                (all_missing(&p.feature_names()), ProviderOutcome::Error)
            }
            Err(_) => (all_missing(&p.feature_names()), ProviderOutcome::Timeout),
        };
        ProviderReport {
            provider_id: p.id().to_string(),
            features,
            latency_ms,
            outcome,
        }
    });
    Ok(join_all(calls).await)
}

fn stub_rng(seed: u64, id: &str, host: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    h.update([0u8]);
    h.update(host.to_ascii_lowercase().as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

pub const WHOIS_STUB_ID: &str = "whois-stub";
pub const SEARCH_STUB_ID: &str = "search-stub";
pub const CONTENT_STUB_ID: &str = "content-stub";

/// Registration-record stub: registration status, registration length and
/// age in days, DNS record presence.
#[derive(Debug, Clone)]
pub struct WhoisStub {
    pub seed: u64,
}

#[async_trait]
impl FeatureProvider for WhoisStub {
    fn id(&self) -> &str {
        WHOIS_STUB_ID
    }

    fn feature_names(&self) -> Vec<&'static str> {
        vec![
            "whois_registered_domain",
            "domain_registration_length",
            "domain_age",
            "dns_record",
        ]
    }

    fn is_stub(&self) -> bool {
        true
    }

    async fn fetch(&self, parts: &UrlParts) -> Result<NamedFeatureMap, ProviderError> {
        let mut rng = stub_rng(self.seed, self.id(), &parts.host);
        let mut m = NamedFeatureMap::new();
        // 0 means registered, following the dataset's column semantics.
        m.set_flag("whois_registered_domain", rng.random_bool(0.1));
        m.set("domain_registration_length", rng.random_range(0..=3650) as f64);
        m.set("domain_age", rng.random_range(0..=12000) as f64);
        m.set_flag("dns_record", rng.random_bool(0.05));
        Ok(m)
    }
}

/// Search-index stub: index presence, rank and traffic.
#[derive(Debug, Clone)]
pub struct SearchStub {
    pub seed: u64,
}

#[async_trait]
impl FeatureProvider for SearchStub {
    fn id(&self) -> &str {
        SEARCH_STUB_ID
    }

    fn feature_names(&self) -> Vec<&'static str> {
        vec!["google_index", "page_rank", "web_traffic", "statistical_report"]
    }

    fn is_stub(&self) -> bool {
        true
    }

    async fn fetch(&self, parts: &UrlParts) -> Result<NamedFeatureMap, ProviderError> {
        let mut rng = stub_rng(self.seed, self.id(), &parts.host);
        let mut m = NamedFeatureMap::new();
        m.set_flag("google_index", rng.random_bool(0.3));
        m.set("page_rank", rng.random_range(0..=10) as f64);
        m.set("web_traffic", rng.random_range(0..=10_000_000) as f64);
        m.set_flag("statistical_report", rng.random_bool(0.05));
        Ok(m)
    }
}

/// Page stub: synthesizes a small document from the host hash and runs the
/// markup extractor over it.
#[derive(Debug, Clone)]
pub struct ContentStub {
    pub seed: u64,
}

impl ContentStub {
    fn synth_page(&self, parts: &UrlParts) -> String {
        let mut rng = stub_rng(self.seed, CONTENT_STUB_ID, &parts.host);
        let mut html = String::from("<html><head>");
        if rng.random_bool(0.8) {
            html.push_str(&format!("<title>{}</title>", parts.registrable_domain));
        }
        html.push_str("</head><body>");
        for i in 0..rng.random_range(0..20) {
            match rng.random_range(0..4) {
                0 => html.push_str(&format!("<a href=\"https://ext{i}.example.net/\">x</a>")),
                1 => html.push_str("<a href=\"#\">x</a>"),
                _ => html.push_str(&format!("<a href=\"/p{i}\">x</a>")),
            }
        }
        if rng.random_bool(0.1) {
            html.push_str("<iframe src=\"https://frame.example.net/\"></iframe>");
        }
        if rng.random_bool(0.2) {
            html.push_str("<form action=\"\"><input type=\"password\"></form>");
        }
        html.push_str("</body></html>");
        html
    }
}

#[async_trait]
impl FeatureProvider for ContentStub {
    fn id(&self) -> &str {
        CONTENT_STUB_ID
    }

    fn feature_names(&self) -> Vec<&'static str> {
        CONTENT_FEATURES.to_vec()
    }

    fn is_stub(&self) -> bool {
        true
    }

    async fn fetch(&self, parts: &UrlParts) -> Result<NamedFeatureMap, ProviderError> {
        Ok(extract_content_features(&self.synth_page(parts), parts))
    }
}

fn default_provider_ids() -> Vec<String> {
    vec![WHOIS_STUB_ID.into(), SEARCH_STUB_ID.into()]
}

fn default_timeout_ms() -> u64 {
    500
}

/// Provider block of the service configuration. Enrichment is off unless
/// `enabled` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub enabled: bool,
    pub ids: Vec<String>,
    pub timeout_ms: u64,
    pub stub_seed: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            ids: default_provider_ids(),
            timeout_ms: default_timeout_ms(),
            stub_seed: 0,
        }
    }
}

impl ProviderConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    /// Instantiate the configured providers. Only the bundled stubs are known
    /// by id; live adapters are registered by the embedding application.
    pub fn build(&self) -> Result<Vec<Arc<dyn FeatureProvider>>, ProviderError> {
        self.ids
            .iter()
            .map(|id| -> Result<Arc<dyn FeatureProvider>, ProviderError> {
                let seed = self.stub_seed;
                match id.as_str() {
                    WHOIS_STUB_ID => Ok(Arc::new(WhoisStub { seed })),
                    SEARCH_STUB_ID => Ok(Arc::new(SearchStub { seed })),
                    CONTENT_STUB_ID => Ok(Arc::new(ContentStub { seed })),
                    other => Err(ProviderError::UnknownProvider(other.to_string())),
                }
            })
            .collect()
    }
}
