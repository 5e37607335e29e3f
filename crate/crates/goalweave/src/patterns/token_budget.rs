//! Session token budget (`around` advice, budget stage).
//!
//! Pre-checks accumulated usage before the call: once the budget is spent,
//! further calls halt with "Token budget exceeded". Usage is read from the
//! successful result by a pluggable extractor (by default the `tokens`
//! field); failed calls add no usage. A warning fires once when usage
//! crosses the warn fraction.

use std::sync::Mutex;

use serde_json::Value;

use crate::aspect::{Aspect, AspectError, ErrorCategory, JoinPoint, ProceedFn, Stage};

/// Notable budget moments, for dashboards and tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BudgetEvent {
    /// Usage crossed the warn fraction. Fires at most once.
    Warning { used: u64, max: u64 },
    /// The extractor could not read a token count from a result; the call
    /// was counted as zero usage.
    ExtractionMiss { function: String },
}

type ExtractFn = dyn Fn(&Value) -> Option<u64> + Send + Sync;

struct BudgetState {
    used: u64,
    warned: bool,
    events: Vec<BudgetEvent>,
}

/// Hard ceiling on tokens consumed per session or run.
pub struct TokenBudget {
    max_tokens: u64,
    warn_fraction: f64,
    extractor: Box<ExtractFn>,
    state: Mutex<BudgetState>,
}

impl TokenBudget {
    pub fn new(max_tokens: u64) -> Self {
        Self::with_extractor(max_tokens, |result| {
            result.get("tokens").and_then(Value::as_u64)
        })
    }

    pub fn with_extractor(
        max_tokens: u64,
        extractor: impl Fn(&Value) -> Option<u64> + Send + Sync + 'static,
    ) -> Self {
        assert!(max_tokens > 0, "budget must be positive");
        Self {
            max_tokens,
            warn_fraction: 0.8,
            extractor: Box::new(extractor),
            state: Mutex::new(BudgetState {
                used: 0,
                warned: false,
                events: Vec::new(),
            }),
        }
    }

    pub fn warn_fraction(mut self, fraction: f64) -> Self {
        assert!((0.0..=1.0).contains(&fraction));
        self.warn_fraction = fraction;
        self
    }

    pub fn used(&self) -> u64 {
        self.state.lock().unwrap().used
    }

    pub fn remaining(&self) -> u64 {
        self.max_tokens.saturating_sub(self.used())
    }

    pub fn events(&self) -> Vec<BudgetEvent> {
        self.state.lock().unwrap().events.clone()
    }
}

impl Aspect for TokenBudget {
    fn name(&self) -> &str {
        super::names::TOKEN_BUDGET
    }

    fn stage(&self) -> Stage {
        Stage::Budget
    }

    /// Budget checks run inside the cache: a cache hit costs no tokens.
    fn intra_stage_rank(&self) -> u8 {
        1
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        {
            let state = self.state.lock().unwrap();
            if state.used >= self.max_tokens {
                return Err(AspectError::new(
                    ErrorCategory::BudgetExceeded,
                    "Token budget exceeded",
                ));
            }
        }
        let result = proceed(ctx)?;
        let mut state = self.state.lock().unwrap();
        match (self.extractor)(&result) {
            Some(tokens) => state.used = state.used.saturating_add(tokens),
            None => {
                let function = ctx.function_name.clone();
                state.events.push(BudgetEvent::ExtractionMiss { function });
            }
        }
        if !state.warned && (state.used as f64) >= self.warn_fraction * self.max_tokens as f64 {
            state.warned = true;
            let used = state.used;
            state.events.push(BudgetEvent::Warning {
                used,
                max: self.max_tokens,
            });
        }
        Ok(result)
    }
}
