//! Aspect stacking and the canonical eight-stage composition order:
//! authenticate, scope, guard, throttle, budget, protect, observe, audit.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Aspect;

/// Composition stage. Lower stages run outermost: identity verification and
/// scope enforcement precede resource-consuming work, which precedes
/// observability and auditing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Authenticate,
    Scope,
    Guard,
    Throttle,
    Budget,
    Protect,
    Observe,
    Audit,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Authenticate,
        Stage::Scope,
        Stage::Guard,
        Stage::Throttle,
        Stage::Budget,
        Stage::Protect,
        Stage::Observe,
        Stage::Audit,
    ];

    /// 1-based stage rank.
    pub fn rank(self) -> u8 {
        match self {
            Stage::Authenticate => 1,
            Stage::Scope => 2,
            Stage::Guard => 3,
            Stage::Throttle => 4,
            Stage::Budget => 5,
            Stage::Protect => 6,
            Stage::Observe => 7,
            Stage::Audit => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Authenticate => "authenticate",
            Stage::Scope => "scope",
            Stage::Guard => "guard",
            Stage::Throttle => "throttle",
            Stage::Budget => "budget",
            Stage::Protect => "protect",
            Stage::Observe => "observe",
            Stage::Audit => "audit",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone)]
pub(super) struct StackEntry {
    pub aspect: Arc<dyn Aspect>,
    pub stage: Stage,
    pub intra: u8,
    pub registration: usize,
}

/// An ordered chain of aspects, outermost first.
///
/// The ordering is stable: sorting by `(stage, intra-stage rank, registration
/// order)` yields the execution order.
#[derive(Clone, Default)]
pub struct AspectStack {
    pub(super) entries: Vec<StackEntry>,
}

impl AspectStack {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Aspect names in execution order, outermost first.
    pub fn names(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| e.aspect.name().to_string())
            .collect()
    }

    /// Stages in execution order (duplicates preserved).
    pub fn stages(&self) -> Vec<Stage> {
        self.entries.iter().map(|e| e.stage).collect()
    }
}

/// Sort aspects into the canonical execution order.
///
/// Within a stage, `intra_stage_rank` orders known refinements (a response
/// cache runs before budget accounting so hits consume no budget); remaining
/// ties keep registration order.
pub fn canonical_order<I>(aspects: I) -> AspectStack
where
    I: IntoIterator<Item = Arc<dyn Aspect>>,
{
    let mut entries: Vec<StackEntry> = aspects
        .into_iter()
        .enumerate()
        .map(|(registration, aspect)| StackEntry {
            stage: aspect.stage(),
            intra: aspect.intra_stage_rank(),
            aspect,
            registration,
        })
        .collect();
    entries.sort_by_key(|e| (e.stage, e.intra, e.registration));
    AspectStack { entries }
}

#[cfg(test)]
mod tests {
    use super::super::{AdviceOutcome, JoinPoint};
    use super::*;

    struct Named {
        name: &'static str,
        stage: Stage,
        intra: u8,
    }

    impl Aspect for Named {
        fn name(&self) -> &str {
            self.name
        }
        fn stage(&self) -> Stage {
            self.stage
        }
        fn intra_stage_rank(&self) -> u8 {
            self.intra
        }
        fn before(&self, _ctx: &JoinPoint) -> AdviceOutcome {
            AdviceOutcome::Proceed
        }
    }

    fn named(name: &'static str, stage: Stage, intra: u8) -> Arc<dyn Aspect> {
        Arc::new(Named { name, stage, intra })
    }

    #[test]
    fn empty_set_yields_empty_stack() {
        let stack = canonical_order(Vec::new());
        assert!(stack.is_empty());
    }

    #[test]
    fn production_stack_orders_by_stage() {
        let stack = canonical_order(vec![
            named("ActionAuditTrail", Stage::Audit, 0),
            named("AuthorizationGuard", Stage::Authenticate, 0),
            named("RateLimiter", Stage::Throttle, 0),
            named("StructuredLogger", Stage::Observe, 0),
        ]);
        assert_eq!(
            stack.names(),
            vec![
                "AuthorizationGuard",
                "RateLimiter",
                "StructuredLogger",
                "ActionAuditTrail"
            ]
        );
    }

    #[test]
    fn cache_precedes_budget_within_stage() {
        let stack = canonical_order(vec![
            named("TokenBudget", Stage::Budget, 1),
            named("ResponseCache", Stage::Budget, 0),
        ]);
        assert_eq!(stack.names(), vec!["ResponseCache", "TokenBudget"]);
    }

    #[test]
    fn registration_order_breaks_remaining_ties() {
        let stack = canonical_order(vec![
            named("Logger", Stage::Observe, 0),
            named("PerfMonitor", Stage::Observe, 0),
            named("Metrics", Stage::Observe, 0),
        ]);
        assert_eq!(stack.names(), vec!["Logger", "PerfMonitor", "Metrics"]);
    }
}
