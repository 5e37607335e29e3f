//! Scan the bundled source corpus for scattered concern markers and print
//! the per-concern file and module counts.
//!
//! ```sh
//! cargo run --example scan_scattering
//! ```

use std::path::PathBuf;

use goalweave::scattering::{default_concerns, scan};

fn main() {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let report = scan(&corpus, &default_concerns(), 1, "corpus").expect("scan corpus");
    print!("{}", report.to_text());
}
