use std::sync::Arc;

use parking_lot::RwLock;
use threatlens_core::clock::Clock;
use threatlens_core::logs::{LogWindow, SharedWindow};
use threatlens_core::{Engine, EngineError, EngineOptions, ModelBundle};

use crate::config::ServiceConfig;

/// Shared handler state. The engine sits behind a lock only so it can be
/// swapped whole; requests clone the `Arc` and never see a mix of bundles.
#[derive(Clone)]
pub struct AppState {
    engine: Arc<RwLock<Arc<Engine>>>,
    options: EngineOptions,
    window: SharedWindow,
    clock: Arc<dyn Clock>,
}

impl AppState {
    pub fn new(
        bundle: Option<ModelBundle>,
        config: &ServiceConfig,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, EngineError> {
        let options = EngineOptions {
            url_threshold: config.thresholds.url,
            providers: config.providers.clone(),
            ..EngineOptions::default()
        };
        let engine = Engine::new(bundle, options.clone())?;
        let window = SharedWindow::new(
            LogWindow::new(config.log_window.capacity, config.log_window.span_secs),
            config.thresholds.threat,
        );
        Ok(Self {
            engine: Arc::new(RwLock::new(Arc::new(engine))),
            options,
            window,
            clock,
        })
    }

    pub fn engine(&self) -> Arc<Engine> {
        Arc::clone(&self.engine.read())
    }

    /// Replace the loaded models atomically.
    pub fn reload(&self, bundle: Option<ModelBundle>) -> Result<(), EngineError> {
        let engine = Arc::new(Engine::new(bundle, self.options.clone())?);
        *self.engine.write() = engine;
        Ok(())
    }

    pub fn window(&self) -> &SharedWindow {
        &self.window
    }

    pub fn clock(&self) -> Arc<dyn Clock> {
        Arc::clone(&self.clock)
    }
}
