use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use parking_lot::Mutex;
use thiserror::Error;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use tokio::time::{interval_at, Instant, MissedTickBehavior};

use super::{analyze_entries, AnomalyReport, LogEntry, LogError, LogWindow, ThreatThresholds};
use crate::clock::Clock;

pub const DEFAULT_SWEEP_PERIOD: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweeperError {
    #[error("a sweeper is already running on this window")]
    AlreadyRunning,
    #[error("sweep period must be positive")]
    ZeroPeriod,
}

/// A log window shared between the ingest path and the periodic sweeper.
/// Analysis copies the entries under the lock and works on the copy, so
/// ingest waits at most one copy.
#[derive(Clone)]
pub struct SharedWindow {
    inner: Arc<Mutex<LogWindow>>,
    thresholds: ThreatThresholds,
    sweeping: Arc<AtomicBool>,
}

impl SharedWindow {
    pub fn new(window: LogWindow, thresholds: ThreatThresholds) -> Self {
        Self {
            inner: Arc::new(Mutex::new(window)),
            thresholds,
            sweeping: Arc::new(AtomicBool::new(false)),
        }
    }

    pub fn thresholds(&self) -> &ThreatThresholds {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.inner.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.lock().is_empty()
    }

    /// Validate the whole batch first; nothing is ingested if any entry is
    /// invalid.
    pub fn ingest_batch(&self, entries: Vec<LogEntry>) -> Result<(), (usize, LogError)> {
        for (i, e) in entries.iter().enumerate() {
            e.validate().map_err(|err| (i, err))?;
        }
        let mut w = self.inner.lock();
        for e in entries {
            w.ingest(e);
        }
        Ok(())
    }

    pub fn snapshot(&self) -> LogWindow {
        self.inner.lock().clone()
    }

    pub fn analyze(&self, now: i64) -> AnomalyReport {
        let (entries, span): (Vec<LogEntry>, i64) = {
            let w = self.inner.lock();
            (w.entries().cloned().collect(), w.span_ms())
        };
        analyze_entries(&entries, span, now, &self.thresholds)
    }

    /// Emit one report per `period` to `sink`, the first one period after
    /// the start. Only one sweeper may run per window.
    pub fn run_sweeper<F>(
        &self,
        period: Duration,
        clock: Arc<dyn Clock>,
        mut sink: F,
    ) -> Result<SweeperHandle, SweeperError>
    where
        F: FnMut(AnomalyReport) + Send + 'static,
    {
        if period.is_zero() {
            return Err(SweeperError::ZeroPeriod);
        }
        if self
            .sweeping
            .compare_exchange(false, true, Ordering::SeqCst, Ordering::SeqCst)
            .is_err()
        {
            return Err(SweeperError::AlreadyRunning);
        }
        let (stop_tx, mut stop_rx) = oneshot::channel::<()>();
        let window = self.clone();
        let task = tokio::spawn(async move {
            let mut ticks = interval_at(Instant::now() + period, period);
            ticks.set_missed_tick_behavior(MissedTickBehavior::Burst);
            loop {
                tokio::select! {
                    biased;
                    _ = &mut stop_rx => break,
                    _ = ticks.tick() => sink(window.analyze(clock.now_ms())),
                }
            }
        });
        Ok(SweeperHandle {
            stop_tx: Some(stop_tx),
            task: Some(task),
            sweeping: Arc::clone(&self.sweeping),
        })
    }
}

/// Running sweeper. Dropping the handle also stops it.
pub struct SweeperHandle {
    stop_tx: Option<oneshot::Sender<()>>,
    task: Option<JoinHandle<()>>,
    sweeping: Arc<AtomicBool>,
}

impl SweeperHandle {
    pub async fn stop(mut self) {
        if let Some(tx) = self.stop_tx.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
        self.sweeping.store(false, Ordering::SeqCst);
    }
}

impl Drop for SweeperHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.stop_tx.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            task.abort();
        }
        self.sweeping.store(false, Ordering::SeqCst);
    }
}
