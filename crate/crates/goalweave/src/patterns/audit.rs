//! Action audit trail (`before`/`after`/`after_error` advice, audit stage).
//!
//! Appends one entry per advice firing to an append-only [`AuditStore`],
//! keyed by session. The store persists as NDJSON with a fixed field order
//! so trails diff cleanly.

use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::aspect::{AdviceOutcome, Aspect, AspectError, JoinPoint, Stage};
use crate::clock::SharedClock;
use crate::error::WorkbenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditPhase {
    Attempted,
    Completed,
    Failed,
}

/// One audited action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub timestamp: String,
    pub session: Option<String>,
    pub action: String,
    pub phase: AuditPhase,
    pub details: Option<String>,
}

/// Append-only audit log.
#[derive(Default)]
pub struct AuditStore {
    entries: Mutex<Vec<AuditEntry>>,
}

impl AuditStore {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn append(&self, entry: AuditEntry) {
        self.entries.lock().unwrap().push(entry);
    }

    pub fn entries(&self) -> Vec<AuditEntry> {
        self.entries.lock().unwrap().clone()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries belonging to one session, in arrival order.
    pub fn by_session(&self, session: &str) -> Vec<AuditEntry> {
        self.entries
            .lock()
            .unwrap()
            .iter()
            .filter(|e| e.session.as_deref() == Some(session))
            .cloned()
            .collect()
    }

    /// Persist the trail as NDJSON, one entry per line.
    pub fn persist(&self, path: &Path) -> Result<(), WorkbenchError> {
        let entries = self.entries.lock().unwrap();
        let mut file = std::fs::File::create(path)?;
        for entry in entries.iter() {
            serde_json::to_writer(&mut file, entry)
                .map_err(|e| WorkbenchError::Config(format!("audit serialization: {e}")))?;
            writeln!(file)?;
        }
        Ok(())
    }
}

/// Forensic trail of every attempted action.
pub struct ActionAuditTrail {
    store: Arc<AuditStore>,
    clock: SharedClock,
}

impl ActionAuditTrail {
    pub fn new(store: Arc<AuditStore>, clock: SharedClock) -> Self {
        Self { store, clock }
    }

    pub fn store(&self) -> Arc<AuditStore> {
        self.store.clone()
    }

    fn entry(&self, ctx: &JoinPoint, phase: AuditPhase, details: Option<String>) -> AuditEntry {
        AuditEntry {
            timestamp: self.clock.utc_now().to_rfc3339(),
            session: ctx.session_id.clone(),
            action: ctx.function_name.clone(),
            phase,
            details,
        }
    }
}

impl Aspect for ActionAuditTrail {
    fn name(&self) -> &str {
        super::names::ACTION_AUDIT_TRAIL
    }

    fn stage(&self) -> Stage {
        Stage::Audit
    }

    fn before(&self, ctx: &JoinPoint) -> AdviceOutcome {
        self.store
            .append(self.entry(ctx, AuditPhase::Attempted, Some(ctx.rendered_args())));
        AdviceOutcome::Proceed
    }

    fn after(&self, ctx: &JoinPoint, _result: &Value) {
        self.store.append(self.entry(ctx, AuditPhase::Completed, None));
    }

    fn after_error(&self, ctx: &JoinPoint, error: &AspectError) {
        self.store
            .append(self.entry(ctx, AuditPhase::Failed, Some(error.to_string())));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::ErrorCategory;
    use crate::clock::FakeClock;
    use serde_json::json;

    #[test]
    fn records_attempt_completion_and_failure() {
        let store = AuditStore::new();
        let trail = ActionAuditTrail::new(store.clone(), FakeClock::new());
        let jp = JoinPoint::new("execute_shell").with_session("s-9");
        trail.before(&jp);
        trail.after(&jp, &json!("ok"));
        trail.after_error(&jp, &AspectError::new(ErrorCategory::Execution, "boom"));
        let entries = store.entries();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[0].phase, AuditPhase::Attempted);
        assert_eq!(entries[1].phase, AuditPhase::Completed);
        assert_eq!(entries[2].phase, AuditPhase::Failed);
        assert!(entries[2].details.as_deref().unwrap().contains("boom"));
    }

    #[test]
    fn sessions_are_queryable() {
        let store = AuditStore::new();
        let trail = ActionAuditTrail::new(store.clone(), FakeClock::new());
        trail.before(&JoinPoint::new("a").with_session("s-1"));
        trail.before(&JoinPoint::new("b").with_session("s-2"));
        trail.before(&JoinPoint::new("c").with_session("s-1"));
        let s1 = store.by_session("s-1");
        assert_eq!(s1.len(), 2);
        assert_eq!(s1[0].action, "a");
        assert_eq!(s1[1].action, "c");
    }

    #[test]
    fn persists_as_ndjson_with_stable_field_order() {
        let store = AuditStore::new();
        let trail = ActionAuditTrail::new(
            store.clone(),
            FakeClock::starting_at(std::time::Duration::from_secs(1_700_000_000)),
        );
        trail.before(&JoinPoint::new("f").with_session("s"));
        trail.after(&JoinPoint::new("f").with_session("s"), &json!(null));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("audit.ndjson");
        store.persist(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        for line in &lines {
            let positions: Vec<usize> = ["\"timestamp\"", "\"session\"", "\"action\"", "\"phase\"", "\"details\""]
                .iter()
                .map(|key| line.find(key).unwrap_or_else(|| panic!("{key} missing in {line}")))
                .collect();
            assert!(positions.windows(2).all(|w| w[0] < w[1]), "field order in {line}");
        }
        assert!(lines[0].contains("\"attempted\""));
    }
}
