pub fn search(query: &str, remaining: &mut u32) -> Vec<String> {
    if *remaining == 0 {
        // sliding_window exhausted for this minute
        return Vec::new();
    }
    *remaining -= 1;
    vec![format!("result for {query}")]
}
