pub struct WindowLimiter {
    pub capacity: u32,
    pub used: u32,
}

impl WindowLimiter {
    // one admission metrics sample per decision
    pub fn admit(&mut self) -> bool {
        if self.used >= self.capacity {
            tracing::warn!("rate_limit window exhausted");
            return false;
        }
        self.used += 1;
        true
    }
}
