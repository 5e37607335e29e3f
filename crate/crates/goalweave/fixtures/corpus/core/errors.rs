pub fn parse_port(raw: &str) -> Result<u16, String> {
    raw.parse::<u16>().map_err(|e| e.to_string())
}
