pub fn route(topic: &str, deny: &[&str]) -> Option<&'static str> {
    if deny.contains(&topic) {
        return None;
    }
    tracing::info!("routing {topic}");
    Some("inbox")
}
