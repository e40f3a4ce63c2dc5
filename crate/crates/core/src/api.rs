//! Request and response bodies of the HTTP API. Shared by the service, the
//! client and the CLI so all three agree on field names.

use serde::{Deserialize, Serialize};

use crate::enrichment::ProviderOutcome;
use crate::logs::LogEntry;
use crate::text::TextStats;

pub const API_PREFIX: &str = "/api/v1";
pub const CLASSIFY_URL_PATH: &str = "/api/v1/classify-url";
pub const CLASSIFY_TEXT_PATH: &str = "/api/v1/classify-text";
pub const LOGS_PATH: &str = "/api/v1/logs";
pub const HEALTH_PATH: &str = "/api/v1/health";

/// Longest input echoed back, in characters.
pub const ECHO_LIMIT: usize = 2048;

pub fn truncate_echo(input: &str) -> String {
    match input.char_indices().nth(ECHO_LIMIT) {
        Some((cut, _)) => input[..cut].to_string(),
        None => input.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyUrlRequest {
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enrich: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyTextRequest {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogsRequest {
    pub entries: Vec<LogEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Phishing,
    Legitimate,
    Spam,
    Ham,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderSummary {
    pub provider_id: String,
    pub outcome: ProviderOutcome,
    pub latency_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictResponse {
    pub input_echo: String,
    pub verdict: Verdict,
    /// Probability of the positive class (phishing or spam).
    pub score: f64,
    pub model_version: String,
    pub latency_ms: f64,
    /// URL verdicts only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imputed_feature_count: Option<usize>,
    /// Text verdicts only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_stats: Option<TextStats>,
    /// Present when enrichment providers were queried.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub providers: Option<Vec<ProviderSummary>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub models_loaded: Vec<String>,
    pub format_version: u32,
}

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub code: String,
}
