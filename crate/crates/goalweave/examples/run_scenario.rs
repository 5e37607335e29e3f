//! Drive the full twelve-pattern canonical stack through a scripted agent
//! session: benign calls, a cache hit, an injection attempt, a role
//! rejection, and provider failures that open the circuit breaker.
//!
//! ```sh
//! cargo run --example run_scenario
//! ```

use std::path::PathBuf;

use goalweave::clock::FakeClock;
use goalweave::testbed::{
    build_canonical_stack, run_scenario, MockProvider, ScenarioScript, StackConfig,
};

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenario.toml");
    let script = ScenarioScript::load(&path).expect("load scenario");
    let stack = build_canonical_stack(MockProvider::new(), FakeClock::new(), StackConfig::default());

    let trace = run_scenario(&stack, &script);

    for (i, call) in trace.calls.iter().enumerate() {
        let outcome = match (&call.response, &call.error) {
            (Some(text), _) => format!("ok: {text}"),
            (None, Some(err)) => format!("rejected: {:?} ({})", err.category, err.message),
            _ => "ok".to_string(),
        };
        println!(
            "call {:>2} [{}] {:<52} -> {outcome}",
            i + 1,
            call.session,
            call.prompt
        );
        println!(
            "         breaker={} budget={} cache_hits={} audit={}",
            call.breaker_phase, call.budget_used, call.cache_hits, call.audit_len
        );
    }

    println!("\nlog records: {}", trace.log_records.len());
    println!("audit entries: {}", trace.audit_entries.len());
    println!("\nmetrics export:\n{}", trace.metrics_export);
}
