//! HTTP/JSON front end for the threatlens engine.
//!
//! Routes:
//! - `POST /api/v1/classify-url`
//! - `POST /api/v1/classify-text`
//! - `POST /api/v1/logs`
//! - `GET /api/v1/health`

mod config;
mod error;
mod routes;
mod state;

use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;
use threatlens_core::clock::{Clock, SystemClock};
use threatlens_core::logs::{SweeperError, ThreatLevel};
use threatlens_core::{load_model_bundle, BundleError, EngineError};
use tokio::net::TcpListener;

pub use config::{
    ConfigError, CorsConfig, LogWindowConfig, ServiceConfig, ThresholdConfig, DEFAULT_LISTEN,
    ENV_BUNDLE, ENV_PORT,
};
pub use error::ApiError;
pub use routes::build_router;
pub use state::AppState;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("address {0} is already in use")]
    PortBusy(String),
    #[error("invalid listen address {0:?}")]
    BadAddress(String),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Sweeper(#[from] SweeperError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub async fn bind(addr: &str) -> Result<TcpListener, ServeError> {
    let sock: SocketAddr = addr
        .parse()
        .map_err(|_| ServeError::BadAddress(addr.to_string()))?;
    TcpListener::bind(sock).await.map_err(|e| {
        if e.kind() == io::ErrorKind::AddrInUse {
            ServeError::PortBusy(addr.to_string())
        } else {
            ServeError::Io(e)
        }
    })
}

/// Build state from `config`, loading the bundle if one is configured.
pub fn state_from_config(
    config: &ServiceConfig,
    clock: Arc<dyn Clock>,
) -> Result<AppState, ServeError> {
    let bundle = match &config.bundle_path {
        Some(p) => Some(load_model_bundle(p)?),
        None => None,
    };
    Ok(AppState::new(bundle, config, clock)?)
}

/// Serve on `listener` with the periodic log sweeper until `shutdown`
/// resolves.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    config: &ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let period = Duration::from_secs(config.log_window.sweep_period_secs.max(1));
    let sweeper = state
        .window()
        .run_sweeper(period, state.clock(), |report| {
            if report.threat_level >= ThreatLevel::Medium {
                tracing::warn!(
                    threat = ?report.threat_level,
                    error_ratio = report.error_ratio,
                    total = report.total,
                    "elevated error rate in request log"
                );
            } else {
                tracing::debug!(total = report.total, "log sweep");
            }
        })?;
    let app = build_router(state, &config.cors);
    tracing::info!(addr = %listener.local_addr()?, "listening");
    let result = axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await;
    sweeper.stop().await;
    Ok(result?)
}

/// Convenience for binaries: system clock, config-driven bind.
pub async fn run(
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let state = state_from_config(&config, Arc::new(SystemClock))?;
    let listener = bind(&config.listen).await?;
    serve(listener, state, &config, shutdown).await
}
