use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use threatlens_core::enrichment::ProviderConfig;
use threatlens_core::logs::{ThreatThresholds, DEFAULT_CAPACITY, DEFAULT_SPAN_SECS};

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8787";
pub const ENV_PORT: &str = "THREATLENS_PORT";
pub const ENV_BUNDLE: &str = "THREATLENS_BUNDLE";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid {var}: {value:?}")]
    BadEnv { var: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogWindowConfig {
    pub capacity: usize,
    pub span_secs: u64,
    pub sweep_period_secs: u64,
}

impl Default for LogWindowConfig {
    fn default() -> Self {
        Self {
            capacity: DEFAULT_CAPACITY,
            span_secs: DEFAULT_SPAN_SECS,
            sweep_period_secs: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    /// URL scores at or above this are phishing.
    pub url: f64,
    pub threat: ThreatThresholds,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            url: 0.5,
            threat: ThreatThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorsConfig {
    /// Accept any `chrome-extension://` or `moz-extension://` origin.
    pub allow_extensions: bool,
    pub allowed_origins: Vec<String>,
}

impl Default for CorsConfig {
    fn default() -> Self {
        Self {
            allow_extensions: true,
            allowed_origins: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: String,
    pub bundle_path: Option<PathBuf>,
    pub providers: ProviderConfig,
    pub log_window: LogWindowConfig,
    pub thresholds: ThresholdConfig,
    pub cors: CorsConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            listen: DEFAULT_LISTEN.to_string(),
            bundle_path: None,
            providers: ProviderConfig::default(),
            log_window: LogWindowConfig::default(),
            thresholds: ThresholdConfig::default(),
            cors: CorsConfig::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Apply `THREATLENS_PORT` and `THREATLENS_BUNDLE` from `get`.
    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(port) = get(ENV_PORT) {
            let p: u16 = port.trim().parse().map_err(|_| ConfigError::BadEnv {
                var: ENV_PORT,
                value: port.clone(),
            })?;
            self.set_port(p);
        }
        if let Some(bundle) = get(ENV_BUNDLE) {
            if !bundle.is_empty() {
                self.bundle_path = Some(PathBuf::from(bundle));
            }
        }
        Ok(())
    }

    pub fn set_port(&mut self, port: u16) {
        let host = match self.listen.rsplit_once(':') {
            Some((h, _)) => h.to_string(),
            None => self.listen.clone(),
        };
        self.listen = format!("{host}:{port}");
    }
}
