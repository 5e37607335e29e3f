pub fn parse_seconds(raw: &str) -> Result<u64, String> {
    match raw.parse::<u64>() {
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}
