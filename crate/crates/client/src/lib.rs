//! Typed client for the threatlens HTTP API.
//!
//! ```no_run
//! # async fn demo() -> Result<(), threatlens_client::ClientError> {
//! let client = threatlens_client::Client::new("http://127.0.0.1:8787")?;
//! let verdict = client.classify_url("http://example.com/login").await?;
//! println!("{:?} {:.4}", verdict.verdict, verdict.score);
//! # Ok(()) }
//! ```

use std::time::Duration;

use reqwest::{StatusCode, Url};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;
use threatlens_core::api::{
    ClassifyTextRequest, ClassifyUrlRequest, ErrorBody, HealthResponse, LogsRequest,
    VerdictResponse, CLASSIFY_TEXT_PATH, CLASSIFY_URL_PATH, HEALTH_PATH, LOGS_PATH,
};
use threatlens_core::logs::{AnomalyReport, LogEntry};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("invalid base URL {0:?}")]
    BadBaseUrl(String),
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    /// The service answered with an error body.
    #[error("{status} {}: {}", body.code, body.error)]
    Api { status: StatusCode, body: ErrorBody },
    #[error("unexpected {status} response: {text}")]
    Unexpected { status: StatusCode, text: String },
}

impl ClientError {
    /// The service error code (`malformed_url`, `empty_text`, ...), if any.
    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Api { body, .. } => Some(&body.code),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: Url,
    http: reqwest::Client,
}

impl Client {
    pub fn new(base_url: &str) -> Result<Self, ClientError> {
        Self::with_timeout(base_url, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(base_url: &str, timeout: Duration) -> Result<Self, ClientError> {
        let base = Url::parse(base_url)
            .ok()
            .filter(|u| matches!(u.scheme(), "http" | "https"))
            .ok_or_else(|| ClientError::BadBaseUrl(base_url.to_string()))?;
        let http = reqwest::Client::builder().timeout(timeout).build()?;
        Ok(Self { base, http })
    }

    pub fn base_url(&self) -> &Url {
        &self.base
    }

    fn url(&self, path: &str) -> Result<Url, ClientError> {
        self.base
            .join(path)
            .map_err(|_| ClientError::BadBaseUrl(self.base.to_string()))
    }

    async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
        let status = resp.status();
        let text = resp.text().await?;
        if status.is_success() {
            if let Ok(v) = serde_json::from_str(&text) {
                return Ok(v);
            }
        } else if let Ok(body) = serde_json::from_str::<ErrorBody>(&text) {
            return Err(ClientError::Api { status, body });
        }
        Err(ClientError::Unexpected { status, text })
    }

    async fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, ClientError> {
        let resp = self.http.post(self.url(path)?).json(body).send().await?;
        Self::decode(resp).await
    }

    pub async fn classify_url(&self, url: &str) -> Result<VerdictResponse, ClientError> {
        self.classify_url_with(url, None).await
    }

    /// `enrich: Some(false)` skips enrichment even when the service enables it.
    pub async fn classify_url_with(
        &self,
        url: &str,
        enrich: Option<bool>,
    ) -> Result<VerdictResponse, ClientError> {
        let req = ClassifyUrlRequest {
            url: url.to_string(),
            enrich,
        };
        self.post(CLASSIFY_URL_PATH, &req).await
    }

    pub async fn classify_text(&self, text: &str) -> Result<VerdictResponse, ClientError> {
        let req = ClassifyTextRequest {
            text: text.to_string(),
        };
        self.post(CLASSIFY_TEXT_PATH, &req).await
    }

    pub async fn submit_logs(&self, entries: Vec<LogEntry>) -> Result<AnomalyReport, ClientError> {
        self.post(LOGS_PATH, &LogsRequest { entries }).await
    }

    pub async fn health(&self) -> Result<HealthResponse, ClientError> {
        let resp = self.http.get(self.url(HEALTH_PATH)?).send().await?;
        Self::decode(resp).await
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_url_must_be_http() {
        assert!(Client::new("http://127.0.0.1:8787").is_ok());
        assert!(Client::new("https://threats.example").is_ok());
        assert!(matches!(Client::new("127.0.0.1:8787"), Err(ClientError::BadBaseUrl(_))));
        assert!(matches!(Client::new("ftp://x"), Err(ClientError::BadBaseUrl(_))));
    }

    #[test]
    fn paths_join_onto_base() {
        let c = Client::new("http://127.0.0.1:8787/").unwrap();
        assert_eq!(
            c.url(HEALTH_PATH).unwrap().as_str(),
            "http://127.0.0.1:8787/api/v1/health"
        );
    }
}
