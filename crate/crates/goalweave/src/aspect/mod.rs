//! The AOP runtime: join points, the four advice kinds, aspect stacking with
//! the canonical eight-stage composition order, and chain execution.
//!
//! Weaving is a runtime wrapper chain. An [`AspectStack`] sorted by
//! `(stage, intra-stage rank, registration order)` executes outermost-first:
//! stage 1 advice runs first on entry and last on exit. A `Halt` from any
//! `before` advice skips the target and everything nested inside it.

mod error;
mod joinpoint;
pub mod recorder;
mod stack;
mod weave;

pub use error::{AspectError, ErrorCategory};
pub use joinpoint::{Argument, JoinPoint};
pub use stack::{canonical_order, AspectStack, Stage};
pub use weave::{execute_chain, weave, Advised, Target};

use serde_json::Value;

/// Decision of a `before` advice.
#[derive(Clone, Debug, PartialEq)]
pub enum AdviceOutcome {
    Proceed,
    Halt(AspectError),
}

/// Continuation handed to `around` advice. Calling it runs the rest of the
/// chain (inner aspects and ultimately the target).
pub type ProceedFn<'a> = dyn FnMut(&JoinPoint) -> Result<Value, AspectError> + 'a;

/// A modular crosscutting concern applied at join points through advice.
///
/// All four advice kinds default to pass-through; a pattern overrides the
/// ones it needs. Aspect state must be internally synchronized: one instance
/// may be shared across targets and threads.
pub trait Aspect: Send + Sync {
    fn name(&self) -> &str;

    /// Composition stage this aspect belongs to.
    fn stage(&self) -> Stage;

    /// Order within a stage; lower runs outermost. Defaults to 0 so that
    /// registration order breaks ties.
    fn intra_stage_rank(&self) -> u8 {
        0
    }

    fn before(&self, _ctx: &JoinPoint) -> AdviceOutcome {
        AdviceOutcome::Proceed
    }

    /// Runs after a successful invocation; receives the result read-only.
    fn after(&self, _ctx: &JoinPoint, _result: &Value) {}

    fn after_error(&self, _ctx: &JoinPoint, _error: &AspectError) {}

    fn around(
        &self,
        ctx: &JoinPoint,
        proceed: &mut ProceedFn<'_>,
    ) -> Result<Value, AspectError> {
        proceed(ctx)
    }
}
