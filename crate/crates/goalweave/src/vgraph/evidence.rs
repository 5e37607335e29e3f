//! Scattering evidence and the softgoal → concern mapping.
//!
//! Evidence records, per concern name, how many files and modules the
//! concern's code touches — the validation input of the finder's step 4.
//! The concern map connects model softgoals to scanner concern names; keys
//! may be plain softgoal names (`Security`) or qualified per functional
//! goal (`Execute Shell/Security`) for goal-specific concerns.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::WorkbenchError;

/// Per-concern scattering counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcernEvidence {
    pub file_count: u64,
    pub module_count: u64,
}

/// Measured scattering per concern name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScatterEvidence {
    pub concerns: BTreeMap<String, ConcernEvidence>,
}

impl ScatterEvidence {
    pub fn get(&self, concern: &str) -> Option<ConcernEvidence> {
        self.concerns.get(concern).copied()
    }

    pub fn insert(&mut self, concern: impl Into<String>, files: u64, modules: u64) {
        assert!(modules <= files, "a concern cannot span more modules than files");
        self.concerns.insert(
            concern.into(),
            ConcernEvidence {
                file_count: files,
                module_count: modules,
            },
        );
    }

    pub fn load(path: &Path) -> Result<Self, WorkbenchError> {
        let text = std::fs::read_to_string(path)?;
        let evidence: Self = toml::from_str(&text)
            .map_err(|e| WorkbenchError::Config(format!("evidence file {path:?}: {e}")))?;
        for (concern, e) in &evidence.concerns {
            if e.module_count > e.file_count {
                return Err(WorkbenchError::Config(format!(
                    "evidence for {concern:?}: module_count {} exceeds file_count {}",
                    e.module_count, e.file_count
                )));
            }
        }
        Ok(evidence)
    }
}

/// Softgoal → scanner concern mapping.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConcernMap {
    pub entries: BTreeMap<String, String>,
}

impl ConcernMap {
    pub fn load(path: &Path) -> Result<Self, WorkbenchError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| WorkbenchError::Config(format!("concern map {path:?}: {e}")))
    }

    pub fn insert(&mut self, key: impl Into<String>, concern: impl Into<String>) {
        self.entries.insert(key.into(), concern.into());
    }

    /// Look up a softgoal by its plain name.
    pub fn concern_for(&self, softgoal_name: &str) -> Option<&str> {
        self.entries.get(softgoal_name).map(String::as_str)
    }

    /// Look up a `goal/softgoal` pair, falling back to the plain softgoal
    /// name.
    pub fn concern_for_pair(&self, goal_name: &str, softgoal_name: &str) -> Option<&str> {
        self.entries
            .get(&format!("{goal_name}/{softgoal_name}"))
            .or_else(|| self.entries.get(softgoal_name))
            .map(String::as_str)
    }

    /// Whether any qualified (`goal/softgoal`) keys are present.
    pub fn has_qualified_keys(&self) -> bool {
        self.entries.keys().any(|k| k.contains('/'))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
