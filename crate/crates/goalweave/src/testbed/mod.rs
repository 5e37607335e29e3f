//! Mock agent pipeline used as the weaving fixture.
//!
//! Two builds of the same eight callable units (six tools, one gateway
//! handler, one scheduled job):
//!
//! - the [`before`] fixture carries three independent inline rate-limiting
//!   implementations with three error renderings — the scattered shape this
//!   workbench exists to measure, and
//! - the [`after`] fixture weaves the one catalog `RateLimiter` pattern
//!   around all eight units.
//!
//! Every scattered region in the before fixture is tagged with its unit,
//! kind, line count, algorithm and error rendering, so [`measure`] counts
//! by rule instead of heuristics. [`scenario`] drives the full canonical
//! stack over a scripted mock provider.

mod after;
mod before;
mod scenario;

pub use after::{build_after_fixture, AfterPipeline};
pub use before::{build_before_fixture, BeforePipeline};
pub use scenario::{
    build_canonical_stack, run_scenario, CallOutcome, CanonicalStack, ExecutionTrace,
    ScenarioCall, ScenarioScript, StackConfig,
};

use std::collections::{BTreeSet, VecDeque};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::aspect::AspectError;

/// The eight callable units of the pipeline: six tools, the gateway
/// handler, and the scheduled job.
pub const TOOL_UNITS: [&str; 6] = [
    "shell",
    "file_read",
    "file_write",
    "web_search",
    "memory_store",
    "delegate",
];
pub const GATEWAY_UNIT: &str = "gateway";
pub const SCHEDULER_UNIT: &str = "scheduler";

/// All units in a fixed order.
pub fn all_units() -> Vec<&'static str> {
    let mut units = TOOL_UNITS.to_vec();
    units.push(GATEWAY_UNIT);
    units.push(SCHEDULER_UNIT);
    units
}

/// What a unit computes when admitted — identical in both fixtures, so
/// behavioral equivalence is checkable on outputs.
pub(crate) fn unit_output(unit: &str, arg: &str) -> String {
    format!("{unit}:{arg}")
}

/// One scripted provider response.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScriptedOutcome {
    Ok { text: String, tokens: u64 },
    Error { message: String },
}

/// Fake LLM provider consuming a scripted response queue in order. When the
/// script runs dry it answers with a fixed benign response.
#[derive(Default)]
pub struct MockProvider {
    script: Mutex<VecDeque<ScriptedOutcome>>,
    calls: Mutex<Vec<String>>,
}

impl MockProvider {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn push(&self, outcome: ScriptedOutcome) {
        self.script.lock().unwrap().push_back(outcome);
    }

    pub fn push_ok(&self, text: &str, tokens: u64) {
        self.push(ScriptedOutcome::Ok {
            text: text.to_string(),
            tokens,
        });
    }

    pub fn push_error(&self, message: &str) {
        self.push(ScriptedOutcome::Error {
            message: message.to_string(),
        });
    }

    /// Prompts seen so far, in call order.
    pub fn call_log(&self) -> Vec<String> {
        self.calls.lock().unwrap().clone()
    }

    pub fn respond(&self, prompt: &str) -> Result<Value, AspectError> {
        self.calls.lock().unwrap().push(prompt.to_string());
        let scripted = self.script.lock().unwrap().pop_front();
        match scripted {
            Some(ScriptedOutcome::Ok { text, tokens }) => {
                Ok(json!({ "text": text, "tokens": tokens }))
            }
            Some(ScriptedOutcome::Error { message }) => Err(AspectError::execution(message)),
            None => Ok(json!({ "text": "mock response", "tokens": 10 })),
        }
    }
}

/// Which rate-limiting algorithm a region implements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SlidingWindow,
    TokenBucket,
    FixedWindow,
}

/// How a region renders its rejection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorFormat {
    ToolResultString,
    HttpStatusLine,
    JsonBody,
    AspectError,
}

/// Kind of a tagged concern region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// A standalone rate-limiting implementation (a struct plus its logic).
    Implementation,
    /// An inline check pasted into one callable unit.
    InlineCheck,
    /// A declarative aspect annotation at a join point (one line).
    Annotation,
}

/// One tagged region of rate-limiting code in a fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcernRegion {
    pub unit: String,
    pub kind: RegionKind,
    /// Lines of code the region occupies. Annotations are one line;
    /// the woven pattern itself is reusable library code and counts zero.
    pub loc: u64,
    pub algorithm: Option<Algorithm>,
    pub error_format: Option<ErrorFormat>,
}

/// A fixture that can be measured: its tagged concern regions.
pub trait Measurable {
    fn regions(&self) -> &[ConcernRegion];
}

/// Before/after metrics of the rate-limiting refactoring.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoCMetrics {
    pub concern_loc: u64,
    pub implementations: u64,
    pub algorithms: u64,
    pub error_formats: u64,
    pub inline_check_functions: u64,
}

/// Count the concern metrics of a fixture from its tagged regions.
pub fn measure(fixture: &dyn Measurable) -> PoCMetrics {
    let regions = fixture.regions();
    let algorithms: BTreeSet<Algorithm> = regions.iter().filter_map(|r| r.algorithm).collect();
    let error_formats: BTreeSet<ErrorFormat> =
        regions.iter().filter_map(|r| r.error_format).collect();
    PoCMetrics {
        concern_loc: regions.iter().map(|r| r.loc).sum(),
        implementations: regions
            .iter()
            .filter(|r| r.kind == RegionKind::Implementation)
            .count() as u64,
        algorithms: algorithms.len() as u64,
        error_formats: error_formats.len() as u64,
        inline_check_functions: regions
            .iter()
            .filter(|r| r.kind == RegionKind::InlineCheck)
            .count() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Empty;
    impl Measurable for Empty {
        fn regions(&self) -> &[ConcernRegion] {
            &[]
        }
    }

    #[test]
    fn empty_pipeline_measures_all_zeros() {
        assert_eq!(measure(&Empty), PoCMetrics::default());
    }

    #[test]
    fn provider_consumes_the_script_in_order() {
        let provider = MockProvider::new();
        provider.push_ok("first", 5);
        provider.push_error("boom");
        assert_eq!(
            provider.respond("a").unwrap(),
            json!({ "text": "first", "tokens": 5 })
        );
        assert!(provider.respond("b").is_err());
        // Script exhausted: benign default.
        assert_eq!(
            provider.respond("c").unwrap(),
            json!({ "text": "mock response", "tokens": 10 })
        );
        assert_eq!(provider.call_log(), ["a", "b", "c"]);
    }
}
