pub fn open(token: &str, retry: u32) -> Option<u64> {
    // auth token must be non-empty; callers retry on transient failures
    if token.is_empty() || retry > 3 {
        return None;
    }
    Some(token.len() as u64)
}
