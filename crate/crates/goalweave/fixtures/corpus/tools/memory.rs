pub struct Memory {
    pub entries: Vec<(String, String)>,
    pub tokens_used: u64,
}

impl Memory {
    pub fn store(&mut self, key: &str, value: &str) {
        self.tokens_used += (key.len() + value.len()) as u64;
        self.entries.push((key.into(), value.into()));
    }
}
