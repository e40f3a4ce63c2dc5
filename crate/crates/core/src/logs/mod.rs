//! HTTP status categorization and windowed anomaly reports over captured
//! request logs.

mod sweeper;
mod window;

pub use sweeper::{SharedWindow, SweeperError, SweeperHandle, DEFAULT_SWEEP_PERIOD};
pub use window::{LogWindow, DEFAULT_CAPACITY, DEFAULT_SPAN_SECS};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::url_model::parse_url;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("status code {0} outside 100..=599")]
    OutOfRangeStatus(i64),
    #[error("timestamp must be positive, got {0}")]
    InvalidTimestamp(i64),
    #[error("method must be a non-empty token, got {0:?}")]
    InvalidMethod(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusCategory {
    Success,
    Redirection,
    ClientError,
    ServerError,
    Other,
}

pub fn categorize_status(code: i64) -> Result<StatusCategory, LogError> {
    match code {
        200..=299 => Ok(StatusCategory::Success),
        300..=399 => Ok(StatusCategory::Redirection),
        400..=499 => Ok(StatusCategory::ClientError),
        500..=599 => Ok(StatusCategory::ServerError),
        100..=199 => Ok(StatusCategory::Other),
        _ => Err(LogError::OutOfRangeStatus(code)),
    }
}

/// One captured HTTP transaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    /// Epoch milliseconds.
    pub timestamp: i64,
    pub method: String,
    pub url: String,
    pub status_code: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin_tab: Option<String>,
}

impl LogEntry {
    pub fn validate(&self) -> Result<StatusCategory, LogError> {
        if self.timestamp <= 0 {
            return Err(LogError::InvalidTimestamp(self.timestamp));
        }
        if self.method.is_empty() || !self.method.bytes().all(|b| b.is_ascii_graphic()) {
            return Err(LogError::InvalidMethod(self.method.clone()));
        }
        categorize_status(self.status_code)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub success: u64,
    pub redirection: u64,
    pub client_error: u64,
    pub server_error: u64,
    pub other: u64,
}

impl CategoryCounts {
    pub fn add(&mut self, c: StatusCategory) {
        match c {
            StatusCategory::Success => self.success += 1,
            StatusCategory::Redirection => self.redirection += 1,
            StatusCategory::ClientError => self.client_error += 1,
            StatusCategory::ServerError => self.server_error += 1,
            StatusCategory::Other => self.other += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.success + self.redirection + self.client_error + self.server_error + self.other
    }

    pub fn errors(&self) -> u64 {
        self.client_error + self.server_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreatLevel {
    None,
    Low,
    Medium,
    High,
}

/// Threat-level cut points. A window is high when its error ratio reaches
/// `medium_below` or any host reaches `host_error_limit` errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThreatThresholds {
    pub low_below: f64,
    pub medium_below: f64,
    pub host_error_limit: u64,
}

impl Default for ThreatThresholds {
    fn default() -> Self {
        Self {
            low_below: 0.1,
            medium_below: 0.3,
            host_error_limit: 5,
        }
    }
}

impl ThreatThresholds {
    pub fn level(&self, total: u64, error_ratio: f64, worst_host_errors: u64) -> ThreatLevel {
        if total == 0 || error_ratio == 0.0 {
            ThreatLevel::None
        } else if error_ratio >= self.medium_below || worst_host_errors >= self.host_error_limit {
            ThreatLevel::High
        } else if error_ratio < self.low_below {
            ThreatLevel::Low
        } else {
            ThreatLevel::Medium
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostErrors {
    pub host: String,
    pub errors: u64,
}

/// Host key for entries whose URL does not parse.
pub const INVALID_HOST: &str = "invalid";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub window_start: i64,
    pub window_end: i64,
    pub counts: CategoryCounts,
    pub total: u64,
    pub error_ratio: f64,
    pub threat_level: ThreatLevel,
    /// Hosts with at least one error, most errors first.
    pub offending_hosts: Vec<HostErrors>,
}

/// Report over entries with timestamps in `[now - span, now]`.
pub fn analyze_window(window: &LogWindow, now: i64, thresholds: &ThreatThresholds) -> AnomalyReport {
    analyze_entries(window.entries(), window.span_ms(), now, thresholds)
}

pub(crate) fn analyze_entries<'a>(
    entries: impl IntoIterator<Item = &'a LogEntry>,
    span_ms: i64,
    now: i64,
    thresholds: &ThreatThresholds,
) -> AnomalyReport {
    let start = now.saturating_sub(span_ms);
    let mut counts = CategoryCounts::default();
    let mut hosts: BTreeMap<String, u64> = BTreeMap::new();
    for e in entries {
        if e.timestamp < start || e.timestamp > now {
            continue;
        }
        let Ok(cat) = categorize_status(e.status_code) else {
            continue;
        };
        counts.add(cat);
        if matches!(cat, StatusCategory::ClientError | StatusCategory::ServerError) {
            let host = parse_url(&e.url)
                .map(|p| p.host)
                .unwrap_or_else(|_| INVALID_HOST.to_string());
            *hosts.entry(host).or_default() += 1;
        }
    }
    let total = counts.total();
    let error_ratio = if total == 0 {
        0.0
    } else {
        counts.errors() as f64 / total as f64
    };
    let mut offending_hosts: Vec<HostErrors> = hosts
        .into_iter()
        .map(|(host, errors)| HostErrors { host, errors })
        .collect();
    offending_hosts.sort_by(|a, b| b.errors.cmp(&a.errors).then_with(|| a.host.cmp(&b.host)));
    let worst = offending_hosts.first().map_or(0, |h| h.errors);
    AnomalyReport {
        window_start: start,
        window_end: now,
        counts,
        total,
        error_ratio,
        threat_level: thresholds.level(total, error_ratio, worst),
        offending_hosts,
    }
}
