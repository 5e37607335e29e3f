//! The twelve-pattern NFR catalog.
//!
//! Four NFR categories, twelve patterns:
//!
//! | Category      | Pattern              | Advice   | Stage        |
//! |---------------|----------------------|----------|--------------|
//! | Security      | AuthorizationGuard   | before   | authenticate |
//! | Security      | ToolScopeSandbox     | before   | scope        |
//! | Security      | InputValidation      | around   | guard        |
//! | Security      | PromptGuard          | before   | guard        |
//! | Reliability   | RateLimiter          | around   | throttle     |
//! | Cost          | ResponseCache        | around   | budget       |
//! | Cost          | TokenBudget          | around   | budget       |
//! | Reliability   | CircuitBreaker       | around   | protect      |
//! | Observability | StructuredLogger     | B/A/AE   | observe      |
//! | Observability | PerformanceMonitor   | around   | observe      |
//! | Observability | MetricsCollector     | around   | observe      |
//! | Observability | ActionAuditTrail     | B/A/AE   | audit        |
//!
//! Every pattern's mutable state is internally synchronized so one instance
//! can be shared across targets and threads (global rate limits, shared
//! budgets). Time flows through an injected [`crate::clock::Clock`].

mod audit;
mod authorization;
mod circuit_breaker;
mod logger;
mod metrics;
mod perf_monitor;
mod prompt_guard;
mod rate_limiter;
mod response_cache;
mod token_budget;
mod tool_scope;
mod validation;

pub use audit::{ActionAuditTrail, AuditEntry, AuditPhase, AuditStore};
pub use authorization::{authorization_guard_before, AuthorizationGuard, ROLES_METADATA_KEY};
pub use circuit_breaker::{BreakerConfig, BreakerPhase, CircuitBreaker};
pub use logger::{LogPhase, LogRecord, LogSink, MemorySink, StructuredLogger};
pub use metrics::{MetricsCollector, HISTOGRAM_BOUNDS_MS};
pub use perf_monitor::{FunctionStats, PerformanceMonitor};
pub use prompt_guard::{
    default_ruleset, prompt_guard_before, GuardEvent, GuardRule, PromptGuard, RuleAction,
};
pub use rate_limiter::{LimiterScope, RateLimiter};
pub use response_cache::ResponseCache;
pub use token_budget::{BudgetEvent, TokenBudget};
pub use tool_scope::{
    tool_scope_before, OperationClass, ToolScopeConfig, ToolScopeSandbox, OPERAND_METADATA_KEY,
    OPERATION_METADATA_KEY,
};
pub use validation::{run_validators, InputValidation, Validator};

use crate::aspect::Stage;

/// NFR category a softgoal (and its patterns) belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NfrCategory {
    Security,
    Reliability,
    Observability,
    Cost,
}

impl NfrCategory {
    /// Classify a softgoal by name. Unrecognized names are unclassified.
    pub fn classify(softgoal_name: &str) -> Option<Self> {
        let lower = softgoal_name.to_lowercase();
        if lower.contains("secur") || lower.contains("safety") || lower.contains("auth") {
            Some(NfrCategory::Security)
        } else if lower.contains("relia") || lower.contains("avail") || lower.contains("perf") {
            Some(NfrCategory::Reliability)
        } else if lower.contains("observ") || lower.contains("account") || lower.contains("audit")
        {
            Some(NfrCategory::Observability)
        } else if lower.contains("cost") || lower.contains("sustain") {
            Some(NfrCategory::Cost)
        } else {
            None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NfrCategory::Security => "security",
            NfrCategory::Reliability => "reliability",
            NfrCategory::Observability => "observability",
            NfrCategory::Cost => "cost",
        }
    }

    /// Catalog patterns addressing this category.
    pub fn patterns(self) -> &'static [&'static str] {
        match self {
            NfrCategory::Security => &[
                names::AUTHORIZATION_GUARD,
                names::TOOL_SCOPE_SANDBOX,
                names::PROMPT_GUARD,
                names::INPUT_VALIDATION,
            ],
            NfrCategory::Reliability => &[names::CIRCUIT_BREAKER, names::RATE_LIMITER],
            NfrCategory::Observability => &[
                names::STRUCTURED_LOGGER,
                names::PERFORMANCE_MONITOR,
                names::METRICS_COLLECTOR,
                names::ACTION_AUDIT_TRAIL,
            ],
            NfrCategory::Cost => &[names::TOKEN_BUDGET, names::RESPONSE_CACHE],
        }
    }
}

/// Canonical pattern names.
pub mod names {
    pub const AUTHORIZATION_GUARD: &str = "AuthorizationGuard";
    pub const INPUT_VALIDATION: &str = "InputValidation";
    pub const TOOL_SCOPE_SANDBOX: &str = "ToolScopeSandbox";
    pub const PROMPT_GUARD: &str = "PromptGuard";
    pub const CIRCUIT_BREAKER: &str = "CircuitBreaker";
    pub const RATE_LIMITER: &str = "RateLimiter";
    pub const STRUCTURED_LOGGER: &str = "StructuredLogger";
    pub const PERFORMANCE_MONITOR: &str = "PerformanceMonitor";
    pub const METRICS_COLLECTOR: &str = "MetricsCollector";
    pub const ACTION_AUDIT_TRAIL: &str = "ActionAuditTrail";
    pub const TOKEN_BUDGET: &str = "TokenBudget";
    pub const RESPONSE_CACHE: &str = "ResponseCache";

    pub const ALL: [&str; 12] = [
        AUTHORIZATION_GUARD,
        INPUT_VALIDATION,
        TOOL_SCOPE_SANDBOX,
        PROMPT_GUARD,
        CIRCUIT_BREAKER,
        RATE_LIMITER,
        STRUCTURED_LOGGER,
        PERFORMANCE_MONITOR,
        METRICS_COLLECTOR,
        ACTION_AUDIT_TRAIL,
        TOKEN_BUDGET,
        RESPONSE_CACHE,
    ];
}

/// Stage a catalog pattern is assigned to in the canonical order.
pub fn pattern_stage(pattern: &str) -> Option<Stage> {
    match pattern {
        names::AUTHORIZATION_GUARD => Some(Stage::Authenticate),
        names::TOOL_SCOPE_SANDBOX => Some(Stage::Scope),
        names::INPUT_VALIDATION | names::PROMPT_GUARD => Some(Stage::Guard),
        names::RATE_LIMITER => Some(Stage::Throttle),
        names::RESPONSE_CACHE | names::TOKEN_BUDGET => Some(Stage::Budget),
        names::CIRCUIT_BREAKER => Some(Stage::Protect),
        names::STRUCTURED_LOGGER | names::PERFORMANCE_MONITOR | names::METRICS_COLLECTOR => {
            Some(Stage::Observe)
        }
        names::ACTION_AUDIT_TRAIL => Some(Stage::Audit),
        _ => None,
    }
}
