pub fn accept(peer: &str, paired: &[String]) -> bool {
    // pairing handshake: unknown peers are rejected
    if !paired.iter().any(|p| p == peer) {
        tracing::error!("unknown peer {peer}");
        return false;
    }
    true
}
