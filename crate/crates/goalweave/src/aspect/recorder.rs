//! Trace-recording test double and scenario probe.
//!
//! A [`RecordingAspect`] writes every advice event it observes into a shared
//! [`Trace`]. Weaving tests, the agent testbed and the acceptance suite all
//! assert ordering against these traces.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{AdviceOutcome, Aspect, AspectError, JoinPoint, ProceedFn, Stage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdviceEvent {
    Before,
    AroundEnter,
    AroundExit,
    After,
    AfterError,
    /// Target body execution, pushed by the target itself.
    Target,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub aspect: String,
    pub kind: AdviceEvent,
    pub function: String,
}

/// Shared, thread-safe event log.
#[derive(Clone, Default)]
pub struct Trace {
    entries: Arc<Mutex<Vec<TraceEntry>>>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&self, aspect: &str, kind: AdviceEvent, function: &str) {
        self.entries.lock().unwrap().push(TraceEntry {
            aspect: aspect.to_string(),
            kind,
            function: function.to_string(),
        });
    }

    pub fn push_target(&self, function: &str) {
        self.push(function, AdviceEvent::Target, function);
    }

    pub fn events(&self) -> Vec<TraceEntry> {
        self.entries.lock().unwrap().clone()
    }

    pub fn clear(&self) {
        self.entries.lock().unwrap().clear();
    }

    /// Compact `aspect.kind` rendering for order assertions.
    pub fn summary(&self) -> Vec<String> {
        self.events()
            .iter()
            .map(|e| match e.kind {
                AdviceEvent::Before => format!("{}.before", e.aspect),
                AdviceEvent::AroundEnter => format!("{}.around-enter", e.aspect),
                AdviceEvent::AroundExit => format!("{}.around-exit", e.aspect),
                AdviceEvent::After => format!("{}.after", e.aspect),
                AdviceEvent::AfterError => format!("{}.after_error", e.aspect),
                AdviceEvent::Target => e.aspect.clone(),
            })
            .collect()
    }
}

/// Pass-through aspect that records every advice invocation.
pub struct RecordingAspect {
    name: String,
    stage: Stage,
    trace: Trace,
}

impl RecordingAspect {
    pub fn new(name: impl Into<String>, stage: Stage, trace: &Trace) -> Self {
        Self {
            name: name.into(),
            stage,
            trace: trace.clone(),
        }
    }

    pub fn shared(name: impl Into<String>, stage: Stage, trace: &Trace) -> Arc<dyn Aspect> {
        Arc::new(Self::new(name, stage, trace))
    }
}

impl Aspect for RecordingAspect {
    fn name(&self) -> &str {
        &self.name
    }

    fn stage(&self) -> Stage {
        self.stage
    }

    fn before(&self, ctx: &JoinPoint) -> AdviceOutcome {
        self.trace
            .push(&self.name, AdviceEvent::Before, &ctx.function_name);
        AdviceOutcome::Proceed
    }

    fn after(&self, ctx: &JoinPoint, _result: &Value) {
        self.trace
            .push(&self.name, AdviceEvent::After, &ctx.function_name);
    }

    fn after_error(&self, ctx: &JoinPoint, _error: &AspectError) {
        self.trace
            .push(&self.name, AdviceEvent::AfterError, &ctx.function_name);
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        self.trace
            .push(&self.name, AdviceEvent::AroundEnter, &ctx.function_name);
        let result = proceed(ctx);
        self.trace
            .push(&self.name, AdviceEvent::AroundExit, &ctx.function_name);
        result
    }
}
