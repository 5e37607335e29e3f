//! Track concern scattering across snapshots: diff two scatter reports in
//! percent points and apply measured precision rates to raw counts.
//!
//! ```sh
//! cargo run --example track_evolution
//! ```

use goalweave::scattering::{adjust, compare, ConcernScatter, PrecisionAdjustment, ScatterReport};

fn snapshot(id: &str, concern: &str, files: u64, percent: f64) -> ScatterReport {
    let mut report = ScatterReport {
        snapshot_id: id.to_string(),
        total_files: 100,
        total_modules: 10,
        ..Default::default()
    };
    report.concerns.insert(
        concern.to_string(),
        ConcernScatter {
            file_count: files,
            file_percent: percent,
            ..Default::default()
        },
    );
    report
}

fn main() {
    // Diff: a concern touching 50% of files in v1 and 64% in v4 is a
    // +14pp change.
    let earlier = snapshot("v1", "configuration", 50, 50.0);
    let later = snapshot("v4", "configuration", 64, 64.0);
    let delta = compare(&earlier, &later);
    println!("{} -> {}:", delta.earlier, delta.later);
    for (concern, change) in &delta.deltas {
        println!("  {concern}: {change:?}");
    }

    // Precision adjustment: keyword counts overestimate; scale them by the
    // manually validated true-positive rate per concern.
    let mut measured = ScatterReport::default();
    for (name, count) in [("security_auth", 104u64), ("rate_limiting", 29), ("path_validation", 68)] {
        measured.concerns.insert(
            name.to_string(),
            ConcernScatter {
                file_count: count,
                ..Default::default()
            },
        );
    }
    let mut rates = PrecisionAdjustment::default();
    rates.insert("security_auth", 0.80);
    rates.insert("rate_limiting", 0.64);
    rates.insert("path_validation", 0.32);

    println!("\nprecision-adjusted estimates:");
    for (concern, estimate) in adjust(&measured, &rates).expect("adjust") {
        println!(
            "  {concern}: {} raw x {:.2} = {} files",
            estimate.file_count, estimate.precision, estimate.adjusted
        );
    }
}
