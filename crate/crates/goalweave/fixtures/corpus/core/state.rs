pub struct SessionState {
    pub roles: Vec<String>,
    pub spent: u64,
}

impl SessionState {
    pub fn charge(&mut self, amount: u64) {
        self.spent += amount;
        // budget bookkeeping feeds the latency histogram sink
        tracing::info!("spent {}", self.spent);
    }
}
