use std::collections::VecDeque;

use super::LogEntry;

pub const DEFAULT_CAPACITY: usize = 5_000;
pub const DEFAULT_SPAN_SECS: u64 = 300;

/// Time-ordered, bounded buffer of log entries. Entries older than the span
/// relative to the newest entry are evicted, as are the oldest entries once
/// capacity is exceeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogWindow {
    capacity: usize,
    span_ms: i64,
    entries: VecDeque<LogEntry>,
}

impl Default for LogWindow {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY, DEFAULT_SPAN_SECS)
    }
}

impl LogWindow {
    pub fn new(capacity: usize, span_secs: u64) -> Self {
        Self {
            capacity: capacity.max(1),
            span_ms: (span_secs as i64).saturating_mul(1000),
            entries: VecDeque::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn span_ms(&self) -> i64 {
        self.span_ms
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter()
    }

    /// Insert after any entries with the same timestamp, then evict.
    pub fn ingest(&mut self, entry: LogEntry) {
        let pos = self
            .entries
            .partition_point(|e| e.timestamp <= entry.timestamp);
        self.entries.insert(pos, entry);
        while self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
        let newest = self.entries.back().map_or(i64::MIN, |e| e.timestamp);
        let cutoff = newest.saturating_sub(self.span_ms);
        while self.entries.front().is_some_and(|e| e.timestamp < cutoff) {
            self.entries.pop_front();
        }
    }
}
