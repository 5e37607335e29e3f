//! Compare the hand-rolled rate-limiting pipeline against the woven one:
//! same admission decisions, one implementation instead of three, one
//! error dialect instead of three.
//!
//! ```sh
//! cargo run --example refactoring_payoff
//! ```

use goalweave::clock::FakeClock;
use goalweave::testbed::{build_after_fixture, build_before_fixture, measure, GATEWAY_UNIT};

fn main() {
    let before = build_before_fixture(FakeClock::new());
    let after = build_after_fixture(FakeClock::new());

    let b = measure(&before);
    let a = measure(&after);
    println!("{:<28}{:>8}{:>8}", "metric", "before", "after");
    for (name, bv, av) in [
        ("concern LOC", b.concern_loc, a.concern_loc),
        ("implementations", b.implementations, a.implementations),
        ("distinct algorithms", b.algorithms, a.algorithms),
        ("distinct error formats", b.error_formats, a.error_formats),
        ("inline check functions", b.inline_check_functions, a.inline_check_functions),
    ] {
        println!("{name:<28}{bv:>8}{av:>8}");
    }

    // Behavior is preserved: drive both pipelines past the gateway's
    // 10-per-minute limit and compare.
    println!("\ngateway calls 10 and 11, before vs after:");
    for pipeline in 1..=2 {
        let (label, call): (&str, &dyn Fn(&str) -> Result<String, String>) = if pipeline == 1 {
            ("before", &|arg| before.call(GATEWAY_UNIT, arg))
        } else {
            ("after", &|arg| after.call(GATEWAY_UNIT, arg))
        };
        let mut last = Ok(String::new());
        for i in 0..11 {
            last = call(&format!("req-{i}"));
        }
        println!("  {label}: 11th call -> {last:?}");
    }
}
