//! Execution timing (`around` advice, observe stage).
//!
//! Wraps the target with clock reads and keeps per-function call counts,
//! error counts, and min/max/mean latency.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::aspect::{Aspect, AspectError, JoinPoint, ProceedFn, Stage};
use crate::clock::SharedClock;

/// Latency summary for one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionStats {
    pub calls: u64,
    pub errors: u64,
    pub min: Duration,
    pub max: Duration,
    pub mean: Duration,
}

/// Latency bookkeeping without stopwatch code in the target.
pub struct PerformanceMonitor {
    clock: SharedClock,
    stats: Mutex<BTreeMap<String, (FunctionStats, Duration)>>,
}

impl PerformanceMonitor {
    pub fn new(clock: SharedClock) -> Self {
        Self {
            clock,
            stats: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn stats(&self, function_name: &str) -> Option<FunctionStats> {
        self.stats
            .lock()
            .unwrap()
            .get(function_name)
            .map(|(s, _)| s.clone())
    }

    pub fn all_stats(&self) -> BTreeMap<String, FunctionStats> {
        self.stats
            .lock()
            .unwrap()
            .iter()
            .map(|(k, (s, _))| (k.clone(), s.clone()))
            .collect()
    }

    fn record(&self, function_name: &str, elapsed: Duration, failed: bool) {
        let mut stats = self.stats.lock().unwrap();
        let entry = stats.entry(function_name.to_string()).or_insert((
            FunctionStats {
                calls: 0,
                errors: 0,
                min: Duration::MAX,
                max: Duration::ZERO,
                mean: Duration::ZERO,
            },
            Duration::ZERO,
        ));
        let (summary, total) = entry;
        summary.calls += 1;
        if failed {
            summary.errors += 1;
        }
        summary.min = summary.min.min(elapsed);
        summary.max = summary.max.max(elapsed);
        *total += elapsed;
        summary.mean = *total / summary.calls as u32;
    }
}

impl Aspect for PerformanceMonitor {
    fn name(&self) -> &str {
        super::names::PERFORMANCE_MONITOR
    }

    fn stage(&self) -> Stage {
        Stage::Observe
    }

    /// Timing runs inside the logger within the observe stage.
    fn intra_stage_rank(&self) -> u8 {
        1
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        let started = self.clock.now();
        let result = proceed(ctx);
        let elapsed = self.clock.now().saturating_sub(started);
        self.record(&ctx.function_name, elapsed, result.is_err());
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FakeClock;
    use serde_json::json;

    #[test]
    fn tracks_min_max_mean_across_calls() {
        let clock = FakeClock::new();
        let monitor = PerformanceMonitor::new(clock.clone());
        let jp = JoinPoint::new("f");
        for ms in [10u64, 30, 20] {
            let mut target = |_: &JoinPoint| {
                clock.advance(Duration::from_millis(ms));
                Ok(json!(null))
            };
            monitor.around(&jp, &mut target).unwrap();
        }
        let stats = monitor.stats("f").unwrap();
        assert_eq!(stats.calls, 3);
        assert_eq!(stats.errors, 0);
        assert_eq!(stats.min, Duration::from_millis(10));
        assert_eq!(stats.max, Duration::from_millis(30));
        assert_eq!(stats.mean, Duration::from_millis(20));
    }

    #[test]
    fn errors_are_timed_and_counted() {
        let clock = FakeClock::new();
        let monitor = PerformanceMonitor::new(clock.clone());
        let jp = JoinPoint::new("f");
        let mut target = |_: &JoinPoint| {
            clock.advance(Duration::from_millis(5));
            Err(AspectError::execution("boom"))
        };
        monitor.around(&jp, &mut target).unwrap_err();
        let stats = monitor.stats("f").unwrap();
        assert_eq!(stats.calls, 1);
        assert_eq!(stats.errors, 1);
        assert_eq!(stats.max, Duration::from_millis(5));
    }

    #[test]
    fn functions_are_tracked_separately() {
        let clock = FakeClock::new();
        let monitor = PerformanceMonitor::new(clock.clone());
        let mut target = |_: &JoinPoint| Ok(json!(null));
        monitor.around(&JoinPoint::new("a"), &mut target).unwrap();
        monitor.around(&JoinPoint::new("b"), &mut target).unwrap();
        monitor.around(&JoinPoint::new("b"), &mut target).unwrap();
        assert_eq!(monitor.stats("a").unwrap().calls, 1);
        assert_eq!(monitor.stats("b").unwrap().calls, 2);
        assert_eq!(monitor.all_stats().len(), 2);
    }
}
