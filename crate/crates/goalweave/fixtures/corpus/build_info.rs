pub const VERSION: &str = "0.4.0";
pub const GIT_SHA: &str = "0000000";

pub fn banner() -> String {
    format!("agentd {VERSION} ({GIT_SHA})")
}
