use super::state::SessionState;

pub fn admit(state: &SessionState, role: &str) -> bool {
    // auth gate: only operators may run privileged actions
    if !state.roles.contains(&role.to_string()) {
        tracing::warn!("rejected role {role}");
        return false;
    }
    true
}
