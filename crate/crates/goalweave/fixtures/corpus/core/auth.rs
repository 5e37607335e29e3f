const DENIED: &str = "operation is forbidden for this principal";

pub fn check(principals: &[String], required: &str) -> Option<&'static str> {
    if principals.iter().any(|p| p == required) {
        None
    } else {
        Some(DENIED)
    }
}
