//! The scattered fixture: eight callable units, each enforcing its own
//! rate limit inline, backed by three independently written limiter
//! implementations.
//!
//! This is a deliberate reconstruction of how the concern actually grows in
//! an agent codebase: the tools got a shared `ActionTracker` sliding window,
//! the gateway grew its own sliding window with HTTP-flavored errors, and
//! the scheduler got a token bucket that reports rejections as JSON. Three
//! algorithms' worth of code, three error renderings, eight call sites.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use crate::clock::SharedClock;

use super::{
    unit_output, Algorithm, ConcernRegion, ErrorFormat, Measurable, RegionKind, GATEWAY_UNIT,
    SCHEDULER_UNIT, TOOL_UNITS,
};

/// Sliding-window tracker shared by the six tools: at most `limit` calls
/// per tool within the trailing `window`.
struct ActionTracker {
    limit: usize,
    window: Duration,
    calls: Mutex<BTreeMap<String, Vec<Duration>>>,
}

impl ActionTracker {
    fn new(limit: usize, window: Duration) -> Self {
        Self {
            limit,
            window,
            calls: Mutex::new(BTreeMap::new()),
        }
    }

    fn check_and_record(&self, tool: &str, now: Duration) -> bool {
        let mut calls = self.calls.lock().unwrap();
        let history = calls.entry(tool.to_string()).or_default();
        history.retain(|&t| now.saturating_sub(t) < self.window);
        if history.len() >= self.limit {
            return false;
        }
        history.push(now);
        true
    }
}

/// The gateway's own sliding window over all requests, written separately
/// from the tools' tracker and rejecting with an HTTP status line.
struct GatewayRateLimiter {
    limit: usize,
    window: Duration,
    requests: Mutex<Vec<Duration>>,
}

impl GatewayRateLimiter {
    fn new(limit: usize, window: Duration) -> Self {
        Self {
            limit,
            window,
            requests: Mutex::new(Vec::new()),
        }
    }

    fn admit(&self, now: Duration) -> bool {
        let mut requests = self.requests.lock().unwrap();
        requests.retain(|&t| now.saturating_sub(t) < self.window);
        if requests.len() >= self.limit {
            return false;
        }
        requests.push(now);
        true
    }
}

/// The scheduler's token bucket: `capacity` tokens, refilled continuously
/// at `refill` tokens per `period`.
struct SchedulerBucket {
    capacity: f64,
    refill_per_sec: f64,
    state: Mutex<BucketState>,
}

struct BucketState {
    tokens: f64,
    last_refill: Duration,
}

impl SchedulerBucket {
    fn new(capacity: u32, refill: u32, period: Duration, start: Duration) -> Self {
        Self {
            capacity: capacity as f64,
            refill_per_sec: refill as f64 / period.as_secs_f64(),
            state: Mutex::new(BucketState {
                tokens: capacity as f64,
                last_refill: start,
            }),
        }
    }

    fn take(&self, now: Duration) -> bool {
        let mut state = self.state.lock().unwrap();
        let elapsed = now.saturating_sub(state.last_refill).as_secs_f64();
        state.tokens = (state.tokens + elapsed * self.refill_per_sec).min(self.capacity);
        state.last_refill = now;
        if state.tokens < 1.0 {
            return false;
        }
        state.tokens -= 1.0;
        true
    }
}

/// The pipeline before refactoring: limiting scattered across every unit.
pub struct BeforePipeline {
    clock: SharedClock,
    tracker: ActionTracker,
    gateway: GatewayRateLimiter,
    bucket: SchedulerBucket,
    regions: Vec<ConcernRegion>,
}

/// Per-tool limit shared by the six tools.
pub const TOOL_LIMIT: usize = 100;
pub const TOOL_WINDOW: Duration = Duration::from_secs(3600);
/// Gateway request limit.
pub const GATEWAY_LIMIT: usize = 10;
pub const GATEWAY_WINDOW: Duration = Duration::from_secs(60);
/// Scheduler token bucket: capacity and hourly refill.
pub const SCHEDULER_CAPACITY: u32 = 30;
pub const SCHEDULER_REFILL: u32 = 30;
pub const SCHEDULER_PERIOD: Duration = Duration::from_secs(3600);

impl BeforePipeline {
    /// Dispatch a call to one of the eight units. Admitted calls return the
    /// unit's output; rejected calls return that unit's own error rendering.
    pub fn call(&self, unit: &str, arg: &str) -> Result<String, String> {
        let now = self.clock.now();
        if TOOL_UNITS.contains(&unit) {
            // Inline check pasted into each tool handler.
            if !self.tracker.check_and_record(unit, now) {
                return Err(format!("tool error: rate limit exceeded for {unit}"));
            }
            return Ok(unit_output(unit, arg));
        }
        if unit == GATEWAY_UNIT {
            if !self.gateway.admit(now) {
                return Err("429 Too Many Requests".to_string());
            }
            return Ok(unit_output(unit, arg));
        }
        if unit == SCHEDULER_UNIT {
            if !self.bucket.take(now) {
                return Err(r#"{"error":"throttled","component":"scheduler"}"#.to_string());
            }
            return Ok(unit_output(unit, arg));
        }
        Err(format!("unknown unit {unit}"))
    }
}

impl Measurable for BeforePipeline {
    fn regions(&self) -> &[ConcernRegion] {
        &self.regions
    }
}

/// Build the scattered fixture with its region inventory.
pub fn build_before_fixture(clock: SharedClock) -> BeforePipeline {
    let start = clock.now();
    // Region inventory: line counts taken from the original scattered
    // sources this fixture condenses, not from this file.
    let mut regions = vec![
        ConcernRegion {
            unit: "tools".to_string(),
            kind: RegionKind::Implementation,
            loc: 34,
            algorithm: Some(Algorithm::SlidingWindow),
            error_format: Some(ErrorFormat::ToolResultString),
        },
        ConcernRegion {
            unit: GATEWAY_UNIT.to_string(),
            kind: RegionKind::Implementation,
            loc: 31,
            algorithm: Some(Algorithm::SlidingWindow),
            error_format: Some(ErrorFormat::HttpStatusLine),
        },
        ConcernRegion {
            unit: SCHEDULER_UNIT.to_string(),
            kind: RegionKind::Implementation,
            loc: 26,
            algorithm: Some(Algorithm::TokenBucket),
            error_format: Some(ErrorFormat::JsonBody),
        },
    ];
    for tool in TOOL_UNITS {
        regions.push(ConcernRegion {
            unit: tool.to_string(),
            kind: RegionKind::InlineCheck,
            loc: 13,
            algorithm: Some(Algorithm::SlidingWindow),
            error_format: Some(ErrorFormat::ToolResultString),
        });
    }
    regions.push(ConcernRegion {
        unit: GATEWAY_UNIT.to_string(),
        kind: RegionKind::InlineCheck,
        loc: 14,
        algorithm: Some(Algorithm::SlidingWindow),
        error_format: Some(ErrorFormat::HttpStatusLine),
    });
    regions.push(ConcernRegion {
        unit: SCHEDULER_UNIT.to_string(),
        kind: RegionKind::InlineCheck,
        loc: 12,
        algorithm: Some(Algorithm::TokenBucket),
        error_format: Some(ErrorFormat::JsonBody),
    });

    BeforePipeline {
        tracker: ActionTracker::new(TOOL_LIMIT, TOOL_WINDOW),
        gateway: GatewayRateLimiter::new(GATEWAY_LIMIT, GATEWAY_WINDOW),
        bucket: SchedulerBucket::new(
            SCHEDULER_CAPACITY,
            SCHEDULER_REFILL,
            SCHEDULER_PERIOD,
            start,
        ),
        regions,
        clock,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FakeClock;
    use crate::testbed::measure;

    #[test]
    fn the_scattered_inventory_measures_as_expected() {
        let clock = FakeClock::new();
        let pipeline = build_before_fixture(clock);
        let metrics = measure(&pipeline);
        assert_eq!(metrics.concern_loc, 195);
        assert_eq!(metrics.implementations, 3);
        assert_eq!(metrics.algorithms, 2);
        assert_eq!(metrics.error_formats, 3);
        assert_eq!(metrics.inline_check_functions, 8);
    }

    #[test]
    fn each_unit_rejects_in_its_own_dialect() {
        let clock = FakeClock::new();
        let pipeline = build_before_fixture(clock.clone());
        for _ in 0..TOOL_LIMIT {
            pipeline.call("shell", "x").unwrap();
        }
        assert_eq!(
            pipeline.call("shell", "x").unwrap_err(),
            "tool error: rate limit exceeded for shell"
        );
        for _ in 0..GATEWAY_LIMIT {
            pipeline.call(GATEWAY_UNIT, "req").unwrap();
        }
        assert_eq!(
            pipeline.call(GATEWAY_UNIT, "req").unwrap_err(),
            "429 Too Many Requests"
        );
        for _ in 0..SCHEDULER_CAPACITY {
            pipeline.call(SCHEDULER_UNIT, "job").unwrap();
        }
        assert_eq!(
            pipeline.call(SCHEDULER_UNIT, "job").unwrap_err(),
            r#"{"error":"throttled","component":"scheduler"}"#
        );
    }

    #[test]
    fn tool_limits_are_tracked_per_tool() {
        let clock = FakeClock::new();
        let pipeline = build_before_fixture(clock);
        for _ in 0..TOOL_LIMIT {
            pipeline.call("shell", "x").unwrap();
        }
        // Exhausting shell must not affect file_read.
        assert!(pipeline.call("file_read", "y").is_ok());
    }

    #[test]
    fn windows_slide_and_buckets_refill() {
        let clock = FakeClock::new();
        let pipeline = build_before_fixture(clock.clone());
        for _ in 0..GATEWAY_LIMIT {
            pipeline.call(GATEWAY_UNIT, "req").unwrap();
        }
        assert!(pipeline.call(GATEWAY_UNIT, "req").is_err());
        clock.advance(GATEWAY_WINDOW + Duration::from_secs(1));
        assert!(pipeline.call(GATEWAY_UNIT, "req").is_ok());

        for _ in 0..SCHEDULER_CAPACITY {
            pipeline.call(SCHEDULER_UNIT, "job").unwrap();
        }
        assert!(pipeline.call(SCHEDULER_UNIT, "job").is_err());
        // One hour refills the full bucket; two minutes buys one token.
        clock.advance(Duration::from_secs(120));
        assert!(pipeline.call(SCHEDULER_UNIT, "job").is_ok());
        assert!(pipeline.call(SCHEDULER_UNIT, "job").is_err());
    }
}
