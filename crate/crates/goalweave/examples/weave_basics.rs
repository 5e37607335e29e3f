//! Weave a small aspect stack around a plain function and watch the
//! advice fire in canonical stage order.
//!
//! ```sh
//! cargo run --example weave_basics
//! ```

use std::sync::Arc;
use std::time::Duration;

use serde_json::json;

use goalweave::aspect::{canonical_order, weave, Aspect, JoinPoint};
use goalweave::clock::FakeClock;
use goalweave::patterns::{
    ActionAuditTrail, AuditStore, AuthorizationGuard, LimiterScope, MemorySink, RateLimiter,
    StructuredLogger, ROLES_METADATA_KEY,
};

fn main() {
    let clock = FakeClock::new();
    let shared: goalweave::clock::SharedClock = clock.clone();
    let log_sink = MemorySink::new();
    let audit_store = AuditStore::new();

    // Registration order is irrelevant; canonical_order sorts by stage.
    let stack = canonical_order(vec![
        Arc::new(StructuredLogger::new(log_sink.clone(), shared.clone())) as Arc<dyn Aspect>,
        Arc::new(ActionAuditTrail::new(audit_store.clone(), shared.clone())),
        Arc::new(RateLimiter::new(
            2,
            Duration::from_secs(60),
            LimiterScope::PerFunction,
            shared,
        )),
        Arc::new(AuthorizationGuard::require_role("operator")),
    ]);
    println!("stack (outermost first): {}", stack.names().join(" -> "));

    let advised = weave("greet", stack, |jp: &JoinPoint| {
        Ok(json!(format!("hello, {}", jp.arg("who").unwrap_or("world"))))
    });

    let jp = JoinPoint::new("greet")
        .with_arg("who", "weaver")
        .with_session("demo")
        .with_meta(ROLES_METADATA_KEY, "operator");

    // Two calls fit the limiter window, the third is throttled, and a call
    // without the required role never reaches the limiter at all.
    for i in 1..=3 {
        println!("call {i}: {:?}", advised.call(&jp));
    }
    let anon = JoinPoint::new("greet").with_arg("who", "anon").with_session("demo");
    println!("unauthorized: {:?}", advised.call(&anon));

    println!("\nlog records:");
    for record in log_sink.records() {
        println!(
            "  {} {:?} {}",
            record.function,
            record.phase,
            record.detail.as_deref().unwrap_or("-")
        );
    }
    println!("\naudit entries:");
    for entry in audit_store.entries() {
        println!(
            "  {:?} {} {}",
            entry.phase,
            entry.action,
            entry.details.as_deref().unwrap_or("-")
        );
    }
}
