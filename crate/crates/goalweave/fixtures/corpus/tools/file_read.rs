pub fn read(path: &str, secret: bool) -> Option<String> {
    if secret {
        return None;
    }
    std::fs::read_to_string(path).ok()
}
