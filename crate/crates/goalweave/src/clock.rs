//! Injectable time source.
//!
//! Every pattern that depends on time (rate limiting, circuit breaking,
//! caching, performance monitoring, audit timestamps) reads it through a
//! [`Clock`], so temporal behavior is deterministic under test.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use chrono::{DateTime, TimeZone, Utc};

/// A monotonic-enough time source measured as a duration since an arbitrary
/// epoch.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;

    /// Wall-clock rendering of `now()` for timestamps in logs and audit
    /// entries.
    fn utc_now(&self) -> DateTime<Utc> {
        let now = self.now();
        Utc.timestamp_opt(now.as_secs() as i64, now.subsec_nanos())
            .single()
            .unwrap_or_else(Utc::now)
    }
}

/// System time.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default()
    }

    fn utc_now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Manually advanced clock for tests and deterministic scenarios.
#[derive(Debug, Default)]
pub struct FakeClock {
    nanos: AtomicU64,
}

impl FakeClock {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn starting_at(at: Duration) -> Arc<Self> {
        let clock = Self::default();
        clock.nanos.store(at.as_nanos() as u64, Ordering::SeqCst);
        Arc::new(clock)
    }

    pub fn advance(&self, by: Duration) {
        self.nanos
            .fetch_add(by.as_nanos() as u64, Ordering::SeqCst);
    }

    pub fn set(&self, to: Duration) {
        self.nanos.store(to.as_nanos() as u64, Ordering::SeqCst);
    }
}

impl Clock for FakeClock {
    fn now(&self) -> Duration {
        Duration::from_nanos(self.nanos.load(Ordering::SeqCst))
    }
}

pub type SharedClock = Arc<dyn Clock>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fake_clock_advances() {
        let clock = FakeClock::new();
        assert_eq!(clock.now(), Duration::ZERO);
        clock.advance(Duration::from_millis(10));
        clock.advance(Duration::from_millis(30));
        assert_eq!(clock.now(), Duration::from_millis(40));
    }
}
