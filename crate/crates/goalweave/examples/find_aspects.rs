//! Run the full aspect-discovery pipeline over the bundled agent model:
//! crosscutting density, V-graphs, candidate grouping, and validation of
//! each (goal, softgoal) pair against scattering evidence.
//!
//! ```sh
//! cargo run --example find_aspects
//! ```

use std::path::PathBuf;

use goalweave::goal_model::parse_model;
use goalweave::vgraph::{
    density, find_vgraphs, group_candidates, report, ConcernMap, ReportContext, ScatterEvidence,
};

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let model = parse_model(&std::fs::read_to_string(dir.join("agent_system.istar")).unwrap())
        .expect("parse model");

    let densities = density(&model);
    let vgraphs = find_vgraphs(&model);
    let candidates = group_candidates(&vgraphs);

    let context = ReportContext {
        evidence: Some(ScatterEvidence::load(&dir.join("evidence.toml")).unwrap()),
        concern_map: Some(ConcernMap::load(&dir.join("concern_map.toml")).unwrap()),
        threshold: 3,
    };
    let analysis = report(&model, &densities, &vgraphs, &candidates, &context);
    print!("{}", analysis.to_text());
}
