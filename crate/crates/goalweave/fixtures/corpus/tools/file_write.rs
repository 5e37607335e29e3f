use std::path::Path;

pub fn write(root: &Path, target: &Path, data: &str) -> bool {
    let Ok(resolved) = target.canonicalize() else {
        return false;
    };
    if !resolved.starts_with(root) {
        return false;
    }
    require_approval(&resolved);
    std::fs::write(resolved, data).is_ok()
}

fn require_approval(_: &Path) {}
