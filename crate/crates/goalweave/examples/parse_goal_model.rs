//! Parse an `.istar` goal model, validate it, and print a summary.
//!
//! ```sh
//! cargo run --example parse_goal_model
//! ```

use std::path::PathBuf;

use goalweave::goal_model::{parse_model, to_dsl, ElementKind};

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/agent_system.istar");
    let text = std::fs::read_to_string(&path).expect("read fixture");
    let model = parse_model(&text).expect("parse fixture");

    println!("model: {path:?}");
    println!("elements: {}, links: {}", model.element_count(), model.link_count());
    for kind in [
        ElementKind::Actor,
        ElementKind::Goal,
        ElementKind::Softgoal,
        ElementKind::Task,
        ElementKind::Resource,
    ] {
        let names: Vec<&str> = model
            .elements_of_kind(kind)
            .map(|e| e.name.as_str())
            .collect();
        println!("  {kind:?}: {}", names.join(", "));
    }

    let diagnostics = model.validate();
    if diagnostics.is_empty() {
        println!("validation: clean");
    } else {
        for d in &diagnostics {
            println!("validation: {d}");
        }
    }

    // The DSL round-trips: serializing and reparsing yields the same model.
    let reparsed = parse_model(&to_dsl(&model)).expect("reparse");
    assert_eq!(reparsed, model);
    println!("round-trip: ok");
}
