//! Runtime weaving: wrap a target callable in an aspect stack.

use std::sync::Arc;

use serde_json::Value;

use super::{AdviceOutcome, AspectError, AspectStack, JoinPoint};

/// A callable unit identified by name.
pub type Target = Arc<dyn Fn(&JoinPoint) -> Result<Value, AspectError> + Send + Sync>;

/// A target wrapped in an aspect stack.
///
/// Invocation runs each layer's `before` and `around` outermost-first with
/// the target innermost; `after` / `after_error` fire innermost-first as the
/// stack unwinds. A `Halt` from a `before` advice skips the target and all
/// inner advice, and propagates outward annotated with the halting aspect's
/// name. The weaving structure is immutable after construction.
#[derive(Clone)]
pub struct Advised {
    name: String,
    stack: AspectStack,
    target: Target,
}

impl Advised {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn call(&self, jp: &JoinPoint) -> Result<Value, AspectError> {
        self.invoke(0, jp)
    }

    fn invoke(&self, depth: usize, jp: &JoinPoint) -> Result<Value, AspectError> {
        let Some(entry) = self.stack.entries.get(depth) else {
            return (self.target)(jp);
        };
        let aspect = &entry.aspect;

        if let AdviceOutcome::Halt(mut err) = aspect.before(jp) {
            if err.aspect.is_none() {
                err.aspect = Some(aspect.name().to_string());
            }
            return Err(err);
        }

        let mut proceed = |inner: &JoinPoint| self.invoke(depth + 1, inner);
        match aspect.around(jp, &mut proceed) {
            Ok(value) => {
                aspect.after(jp, &value);
                Ok(value)
            }
            Err(mut err) => {
                if err.aspect.is_none() {
                    err.aspect = Some(aspect.name().to_string());
                }
                aspect.after_error(jp, &err);
                Err(err)
            }
        }
    }
}

/// Wrap `target` in `stack`.
pub fn weave(
    name: impl Into<String>,
    stack: AspectStack,
    target: impl Fn(&JoinPoint) -> Result<Value, AspectError> + Send + Sync + 'static,
) -> Advised {
    Advised {
        name: name.into(),
        stack,
        target: Arc::new(target),
    }
}

/// Invoke an advised callable. Thin alias for [`Advised::call`].
pub fn execute_chain(advised: &Advised, jp: &JoinPoint) -> Result<Value, AspectError> {
    advised.call(jp)
}
