//! Rate limiter (`around` advice, throttle stage).
//!
//! Fixed windows aligned to the clock's epoch: a window of `window` length
//! admits at most `capacity` calls; when the window rolls over the budget
//! refills completely. Scope is either per function name or one global
//! bucket shared by every join point.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use serde_json::Value;

use crate::aspect::{Aspect, AspectError, ErrorCategory, JoinPoint, ProceedFn, Stage};
use crate::clock::SharedClock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimiterScope {
    /// Each function name gets its own budget.
    PerFunction,
    /// One budget shared across all functions.
    Global,
}

#[derive(Debug)]
struct Bucket {
    window_start: Duration,
    remaining: u64,
}

/// Call-frequency throttle.
pub struct RateLimiter {
    capacity: u64,
    window: Duration,
    scope: LimiterScope,
    clock: SharedClock,
    buckets: Mutex<BTreeMap<String, Bucket>>,
}

impl RateLimiter {
    pub fn new(capacity: u64, window: Duration, scope: LimiterScope, clock: SharedClock) -> Self {
        assert!(capacity > 0, "capacity must be positive");
        assert!(!window.is_zero(), "window must be positive");
        Self {
            capacity,
            window,
            scope,
            clock,
            buckets: Mutex::new(BTreeMap::new()),
        }
    }

    fn key(&self, function_name: &str) -> String {
        match self.scope {
            LimiterScope::PerFunction => function_name.to_string(),
            LimiterScope::Global => "global".to_string(),
        }
    }

    /// Take one permit for `function_name`, or report how long until the
    /// current window rolls over.
    pub fn try_acquire(&self, function_name: &str) -> Result<(), Duration> {
        let now = self.clock.now();
        let mut buckets = self.buckets.lock().unwrap();
        let bucket = buckets.entry(self.key(function_name)).or_insert(Bucket {
            window_start: aligned_start(now, self.window),
            remaining: self.capacity,
        });
        if now.saturating_sub(bucket.window_start) >= self.window {
            bucket.window_start = aligned_start(now, self.window);
            bucket.remaining = self.capacity;
        }
        if bucket.remaining > 0 {
            bucket.remaining -= 1;
            Ok(())
        } else {
            Err(bucket.window_start + self.window - now)
        }
    }

    /// Permits left in the current window (without consuming one).
    pub fn remaining(&self, function_name: &str) -> u64 {
        let now = self.clock.now();
        let buckets = self.buckets.lock().unwrap();
        match buckets.get(&self.key(function_name)) {
            Some(b) if now.saturating_sub(b.window_start) < self.window => b.remaining,
            _ => self.capacity,
        }
    }
}

/// Align a timestamp down to the start of its window.
fn aligned_start(now: Duration, window: Duration) -> Duration {
    let w = window.as_nanos();
    Duration::from_nanos(((now.as_nanos() / w) * w) as u64)
}

impl Aspect for RateLimiter {
    fn name(&self) -> &str {
        super::names::RATE_LIMITER
    }

    fn stage(&self) -> Stage {
        Stage::Throttle
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        match self.try_acquire(&ctx.function_name) {
            Ok(()) => proceed(ctx),
            Err(retry_after) => Err(AspectError::new(
                ErrorCategory::RateLimited,
                format!(
                    "rate limit exceeded for {:?}; retry in {}ms",
                    ctx.function_name,
                    retry_after.as_millis()
                ),
            )),
        }
    }
}
