//! Call/error counters and latency histograms (`around` advice, observe
//! stage).
//!
//! Counters increment per function; latencies land in power-of-two
//! millisecond buckets with an overflow bucket at the end. The snapshot
//! exports in a plain-text `name{function="..."} value` form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use serde_json::Value;

use crate::aspect::{Aspect, AspectError, JoinPoint, ProceedFn, Stage};
use crate::clock::SharedClock;

/// Upper bounds (inclusive, in milliseconds) of the histogram buckets; a
/// final overflow bucket catches everything above the last bound.
pub const HISTOGRAM_BOUNDS_MS: [u64; 13] =
    [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096];

#[derive(Clone, Debug, Default)]
struct FunctionMetrics {
    calls: u64,
    errors: u64,
    histogram: [u64; HISTOGRAM_BOUNDS_MS.len() + 1],
}

/// Operational counters without instrumentation in the target.
pub struct MetricsCollector {
    clock: SharedClock,
    metrics: Mutex<BTreeMap<String, FunctionMetrics>>,
}

impl MetricsCollector {
    pub fn new(clock: SharedClock) -> Self {
        Self {
            clock,
            metrics: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn calls(&self, function_name: &str) -> u64 {
        self.metrics
            .lock()
            .unwrap()
            .get(function_name)
            .map_or(0, |m| m.calls)
    }

    pub fn errors(&self, function_name: &str) -> u64 {
        self.metrics
            .lock()
            .unwrap()
            .get(function_name)
            .map_or(0, |m| m.errors)
    }

    /// Histogram counts, one per bound plus the trailing overflow bucket.
    pub fn histogram(&self, function_name: &str) -> Vec<u64> {
        self.metrics
            .lock()
            .unwrap()
            .get(function_name)
            .map_or_else(
                || vec![0; HISTOGRAM_BOUNDS_MS.len() + 1],
                |m| m.histogram.to_vec(),
            )
    }

    /// Plain-text export of every counter and bucket.
    pub fn export(&self) -> String {
        let metrics = self.metrics.lock().unwrap();
        let mut out = String::new();
        for (function, m) in metrics.iter() {
            writeln!(out, "calls_total{{function=\"{function}\"}} {}", m.calls).unwrap();
            writeln!(out, "errors_total{{function=\"{function}\"}} {}", m.errors).unwrap();
            for (i, count) in m.histogram.iter().enumerate() {
                let le = HISTOGRAM_BOUNDS_MS
                    .get(i)
                    .map_or_else(|| "+Inf".to_string(), u64::to_string);
                writeln!(
                    out,
                    "latency_ms_bucket{{function=\"{function}\",le=\"{le}\"}} {count}"
                )
                .unwrap();
            }
        }
        out
    }

    fn record(&self, function_name: &str, elapsed_ms: u64, failed: bool) {
        let mut metrics = self.metrics.lock().unwrap();
        let m = metrics.entry(function_name.to_string()).or_default();
        m.calls += 1;
        if failed {
            m.errors += 1;
        }
        let bucket = HISTOGRAM_BOUNDS_MS
            .iter()
            .position(|&bound| elapsed_ms <= bound)
            .unwrap_or(HISTOGRAM_BOUNDS_MS.len());
        m.histogram[bucket] += 1;
    }
}

impl Aspect for MetricsCollector {
    fn name(&self) -> &str {
        super::names::METRICS_COLLECTOR
    }

    fn stage(&self) -> Stage {
        Stage::Observe
    }

    /// Innermost of the observe-stage trio.
    fn intra_stage_rank(&self) -> u8 {
        2
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        let started = self.clock.now();
        let result = proceed(ctx);
        let elapsed_ms = self.clock.now().saturating_sub(started).as_millis() as u64;
        self.record(&ctx.function_name, elapsed_ms, result.is_err());
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FakeClock;
    use serde_json::json;
    use std::time::Duration;

    #[test]
    fn counts_calls_and_errors() {
        let collector = MetricsCollector::new(FakeClock::new());
        let jp = JoinPoint::new("f");
        let mut ok = |_: &JoinPoint| Ok(json!(null));
        let mut err = |_: &JoinPoint| Err(AspectError::execution("x"));
        collector.around(&jp, &mut ok).unwrap();
        collector.around(&jp, &mut ok).unwrap();
        collector.around(&jp, &mut err).unwrap_err();
        assert_eq!(collector.calls("f"), 3);
        assert_eq!(collector.errors("f"), 1);
    }

    #[test]
    fn zero_duration_lands_in_the_first_bucket() {
        let collector = MetricsCollector::new(FakeClock::new());
        let mut ok = |_: &JoinPoint| Ok(json!(null));
        collector.around(&JoinPoint::new("f"), &mut ok).unwrap();
        assert_eq!(collector.histogram("f")[0], 1);
    }

    #[test]
    fn latencies_land_in_the_right_buckets() {
        let clock = FakeClock::new();
        let collector = MetricsCollector::new(clock.clone());
        for ms in [3u64, 100, 10_000] {
            let mut target = |_: &JoinPoint| {
                clock.advance(Duration::from_millis(ms));
                Ok(json!(null))
            };
            collector.around(&JoinPoint::new("f"), &mut target).unwrap();
        }
        let hist = collector.histogram("f");
        // 3ms -> le=4, 100ms -> le=128, 10s -> overflow.
        assert_eq!(hist[2], 1);
        assert_eq!(hist[7], 1);
        assert_eq!(hist[HISTOGRAM_BOUNDS_MS.len()], 1);
    }

    #[test]
    fn export_is_plain_text_per_function() {
        let collector = MetricsCollector::new(FakeClock::new());
        let mut ok = |_: &JoinPoint| Ok(json!(null));
        collector.around(&JoinPoint::new("g"), &mut ok).unwrap();
        let text = collector.export();
        assert!(text.contains("calls_total{function=\"g\"} 1"));
        assert!(text.contains("errors_total{function=\"g\"} 0"));
        assert!(text.contains("latency_ms_bucket{function=\"g\",le=\"+Inf\"}"));
    }
}
