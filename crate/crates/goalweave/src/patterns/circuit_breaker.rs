//! Circuit breaker (`around` advice, protect stage).
//!
//! Classic three-phase breaker: `Closed` counts consecutive failures and
//! trips to `Open` at the threshold; `Open` rejects every call until the
//! cooldown elapses, then moves to `HalfOpen`; `HalfOpen` admits a limited
//! number of probe calls — one success closes the breaker, one failure
//! re-opens it with a fresh cooldown.

use std::sync::Mutex;
use std::time::Duration;

use serde_json::Value;

use crate::aspect::{Aspect, AspectError, ErrorCategory, JoinPoint, ProceedFn, Stage};
use crate::clock::SharedClock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BreakerPhase {
    Closed,
    Open,
    HalfOpen,
}

#[derive(Clone, Debug)]
pub struct BreakerConfig {
    /// Consecutive failures that trip the breaker.
    pub failure_threshold: u32,
    /// How long the breaker stays open before probing.
    pub cooldown: Duration,
    /// Probe calls admitted in the half-open phase.
    pub half_open_trials: u32,
}

impl Default for BreakerConfig {
    fn default() -> Self {
        Self {
            failure_threshold: 5,
            cooldown: Duration::from_secs(30),
            half_open_trials: 1,
        }
    }
}

#[derive(Debug)]
struct BreakerState {
    phase: BreakerPhase,
    consecutive_failures: u32,
    opened_at: Duration,
    trials_used: u32,
}

/// Failure isolation for flaky dependencies.
pub struct CircuitBreaker {
    config: BreakerConfig,
    clock: SharedClock,
    state: Mutex<BreakerState>,
}

impl CircuitBreaker {
    pub fn new(config: BreakerConfig, clock: SharedClock) -> Self {
        assert!(config.failure_threshold > 0, "threshold must be positive");
        assert!(config.half_open_trials > 0, "trials must be positive");
        Self {
            config,
            clock,
            state: Mutex::new(BreakerState {
                phase: BreakerPhase::Closed,
                consecutive_failures: 0,
                opened_at: Duration::ZERO,
                trials_used: 0,
            }),
        }
    }

    pub fn phase(&self) -> BreakerPhase {
        let mut state = self.state.lock().unwrap();
        self.refresh(&mut state);
        state.phase
    }

    /// Move open → half-open once the cooldown has elapsed.
    fn refresh(&self, state: &mut BreakerState) {
        if state.phase == BreakerPhase::Open
            && self.clock.now().saturating_sub(state.opened_at) >= self.config.cooldown
        {
            state.phase = BreakerPhase::HalfOpen;
            state.trials_used = 0;
        }
    }

    /// Decide whether this call may pass. Called with the lock held.
    fn admit(&self, state: &mut BreakerState) -> Result<(), AspectError> {
        self.refresh(state);
        match state.phase {
            BreakerPhase::Closed => Ok(()),
            BreakerPhase::Open => Err(AspectError::new(
                ErrorCategory::CircuitOpen,
                "circuit open: dependency is failing",
            )),
            BreakerPhase::HalfOpen => {
                if state.trials_used < self.config.half_open_trials {
                    state.trials_used += 1;
                    Ok(())
                } else {
                    Err(AspectError::new(
                        ErrorCategory::CircuitOpen,
                        "circuit half-open: probe already in flight",
                    ))
                }
            }
        }
    }

    fn record_success(&self) {
        let mut state = self.state.lock().unwrap();
        state.consecutive_failures = 0;
        if state.phase == BreakerPhase::HalfOpen {
            state.phase = BreakerPhase::Closed;
            state.trials_used = 0;
        }
    }

    fn record_failure(&self) {
        let mut state = self.state.lock().unwrap();
        match state.phase {
            BreakerPhase::HalfOpen => {
                state.phase = BreakerPhase::Open;
                state.opened_at = self.clock.now();
                state.consecutive_failures = 0;
                state.trials_used = 0;
            }
            BreakerPhase::Closed => {
                state.consecutive_failures += 1;
                if state.consecutive_failures >= self.config.failure_threshold {
                    state.phase = BreakerPhase::Open;
                    state.opened_at = self.clock.now();
                    state.consecutive_failures = 0;
                }
            }
            BreakerPhase::Open => {}
        }
    }
}

impl Aspect for CircuitBreaker {
    fn name(&self) -> &str {
        super::names::CIRCUIT_BREAKER
    }

    fn stage(&self) -> Stage {
        Stage::Protect
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        {
            let mut state = self.state.lock().unwrap();
            self.admit(&mut state)?;
        }
        match proceed(ctx) {
            Ok(value) => {
                self.record_success();
                Ok(value)
            }
            Err(err) => {
                // Rejections by the breaker itself (nested breakers) still
                // count as dependency failures from this breaker's view.
                self.record_failure();
                Err(err)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FakeClock;
    use serde_json::json;
    use std::sync::Arc;

    fn config() -> BreakerConfig {
        BreakerConfig {
            failure_threshold: 3,
            cooldown: Duration::from_secs(10),
            half_open_trials: 1,
        }
    }

    fn call(breaker: &CircuitBreaker, ok: bool) -> Result<Value, AspectError> {
        let jp = JoinPoint::new("dep");
        let mut target = |_: &JoinPoint| {
            if ok {
                Ok(json!("ok"))
            } else {
                Err(AspectError::execution("boom"))
            }
        };
        breaker.around(&jp, &mut target)
    }

    #[test]
    fn trips_after_threshold_consecutive_failures() {
        let clock = FakeClock::new();
        let breaker = CircuitBreaker::new(config(), clock);
        for _ in 0..3 {
            assert_eq!(call(&breaker, false).unwrap_err().category, ErrorCategory::Execution);
        }
        assert_eq!(breaker.phase(), BreakerPhase::Open);
        let err = call(&breaker, true).unwrap_err();
        assert_eq!(err.category, ErrorCategory::CircuitOpen);
    }

    #[test]
    fn success_resets_the_failure_count() {
        let clock = FakeClock::new();
        let breaker = CircuitBreaker::new(config(), clock);
        call(&breaker, false).unwrap_err();
        call(&breaker, false).unwrap_err();
        call(&breaker, true).unwrap();
        call(&breaker, false).unwrap_err();
        call(&breaker, false).unwrap_err();
        assert_eq!(breaker.phase(), BreakerPhase::Closed);
    }

    #[test]
    fn cooldown_admits_a_probe_and_success_closes() {
        let clock = FakeClock::new();
        let breaker = CircuitBreaker::new(config(), clock.clone());
        for _ in 0..3 {
            call(&breaker, false).unwrap_err();
        }
        clock.advance(Duration::from_secs(9));
        assert_eq!(call(&breaker, true).unwrap_err().category, ErrorCategory::CircuitOpen);
        clock.advance(Duration::from_secs(1));
        assert_eq!(breaker.phase(), BreakerPhase::HalfOpen);
        call(&breaker, true).unwrap();
        assert_eq!(breaker.phase(), BreakerPhase::Closed);
    }

    #[test]
    fn failed_probe_reopens_with_a_fresh_cooldown() {
        let clock = FakeClock::new();
        let breaker = CircuitBreaker::new(config(), clock.clone());
        for _ in 0..3 {
            call(&breaker, false).unwrap_err();
        }
        clock.advance(Duration::from_secs(10));
        assert_eq!(call(&breaker, false).unwrap_err().category, ErrorCategory::Execution);
        assert_eq!(breaker.phase(), BreakerPhase::Open);
        // Fresh cooldown from the probe failure, not the original trip.
        clock.advance(Duration::from_secs(9));
        assert_eq!(breaker.phase(), BreakerPhase::Open);
        clock.advance(Duration::from_secs(1));
        assert_eq!(breaker.phase(), BreakerPhase::HalfOpen);
    }

    #[test]
    fn half_open_admits_only_the_configured_trials() {
        let clock = FakeClock::new();
        let breaker = Arc::new(CircuitBreaker::new(config(), clock.clone()));
        for _ in 0..3 {
            call(&breaker, false).unwrap_err();
        }
        clock.advance(Duration::from_secs(10));
        let jp = JoinPoint::new("dep");
        // Admit one probe but don't resolve it yet: a second concurrent call
        // must be rejected.
        {
            let mut state = breaker.state.lock().unwrap();
            breaker.admit(&mut state).unwrap();
            assert!(breaker.admit(&mut state).is_err());
        }
        let _ = jp;
    }
}
