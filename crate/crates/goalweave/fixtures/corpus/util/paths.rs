use std::path::{Path, PathBuf};

pub fn resolve(base: &Path, raw: &str) -> Option<PathBuf> {
    let joined = base.join(raw);
    let resolved = joined.canonicalize().ok()?;
    if resolved.starts_with(base) {
        Some(resolved)
    } else {
        None
    }
}
