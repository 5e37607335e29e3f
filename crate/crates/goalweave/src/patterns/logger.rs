//! Structured invocation logging (`before`/`after`/`after_error` advice,
//! observe stage).
//!
//! Emits one structured record per advice firing to a pluggable [`LogSink`].
//! A failing sink must never fail the business call: sink errors are
//! swallowed and counted instead.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::aspect::{AdviceOutcome, Aspect, AspectError, JoinPoint, Stage};
use crate::clock::SharedClock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogPhase {
    Before,
    After,
    Error,
}

/// One log record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub timestamp: String,
    pub phase: LogPhase,
    pub function: String,
    pub session: Option<String>,
    /// Rendered arguments on `before`; error detail on `error`.
    pub detail: Option<String>,
}

/// Destination for log records. Writes may fail (disk, network); the logger
/// absorbs those failures.
pub trait LogSink: Send + Sync {
    fn write(&self, record: &LogRecord) -> Result<(), String>;
}

/// In-memory sink for tests and demos.
#[derive(Default)]
pub struct MemorySink {
    records: Mutex<Vec<LogRecord>>,
}

impl MemorySink {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn records(&self) -> Vec<LogRecord> {
        self.records.lock().unwrap().clone()
    }
}

impl LogSink for MemorySink {
    fn write(&self, record: &LogRecord) -> Result<(), String> {
        self.records.lock().unwrap().push(record.clone());
        Ok(())
    }
}

/// Invocation logging as an aspect instead of scattered log lines.
pub struct StructuredLogger {
    sink: Arc<dyn LogSink>,
    clock: SharedClock,
    dropped: AtomicU64,
}

impl StructuredLogger {
    pub fn new(sink: Arc<dyn LogSink>, clock: SharedClock) -> Self {
        Self {
            sink,
            clock,
            dropped: AtomicU64::new(0),
        }
    }

    /// Records lost to sink failures.
    pub fn dropped(&self) -> u64 {
        self.dropped.load(Ordering::SeqCst)
    }

    fn emit(&self, phase: LogPhase, ctx: &JoinPoint, detail: Option<String>) {
        let record = LogRecord {
            timestamp: self.clock.utc_now().to_rfc3339(),
            phase,
            function: ctx.function_name.clone(),
            session: ctx.session_id.clone(),
            detail,
        };
        if self.sink.write(&record).is_err() {
            self.dropped.fetch_add(1, Ordering::SeqCst);
        }
    }
}

impl Aspect for StructuredLogger {
    fn name(&self) -> &str {
        super::names::STRUCTURED_LOGGER
    }

    fn stage(&self) -> Stage {
        Stage::Observe
    }

    fn before(&self, ctx: &JoinPoint) -> AdviceOutcome {
        self.emit(LogPhase::Before, ctx, Some(ctx.rendered_args()));
        AdviceOutcome::Proceed
    }

    fn after(&self, ctx: &JoinPoint, _result: &Value) {
        self.emit(LogPhase::After, ctx, None);
    }

    fn after_error(&self, ctx: &JoinPoint, error: &AspectError) {
        self.emit(LogPhase::Error, ctx, Some(error.to_string()));
    }
}
