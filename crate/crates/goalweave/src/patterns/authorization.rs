//! Role-based authorization guard (`before` advice, authenticate stage).

use crate::aspect::{AdviceOutcome, Aspect, AspectError, ErrorCategory, JoinPoint, Stage};

/// Metadata key carrying the principal's roles as a comma-separated list.
pub const ROLES_METADATA_KEY: &str = "roles";

/// Proceed iff the principal carries `required_role`.
pub fn authorization_guard_before(jp: &JoinPoint, required_role: &str) -> AdviceOutcome {
    debug_assert!(!required_role.is_empty());
    let Some(roles) = jp.meta(ROLES_METADATA_KEY) else {
        return AdviceOutcome::Halt(AspectError::new(
            ErrorCategory::AuthorizationDenied,
            "no principal",
        ));
    };
    let authorized = roles
        .split(',')
        .map(str::trim)
        .any(|role| role == required_role);
    if authorized {
        AdviceOutcome::Proceed
    } else {
        AdviceOutcome::Halt(AspectError::new(
            ErrorCategory::AuthorizationDenied,
            format!("principal lacks required role {required_role:?}"),
        ))
    }
}

/// RBAC check applied before the target runs.
pub struct AuthorizationGuard {
    required_role: String,
}

impl AuthorizationGuard {
    pub fn require_role(role: impl Into<String>) -> Self {
        let required_role = role.into();
        assert!(!required_role.is_empty(), "required role must be non-empty");
        Self { required_role }
    }
}

impl Aspect for AuthorizationGuard {
    fn name(&self) -> &str {
        super::names::AUTHORIZATION_GUARD
    }

    fn stage(&self) -> Stage {
        Stage::Authenticate
    }

    fn before(&self, ctx: &JoinPoint) -> AdviceOutcome {
        authorization_guard_before(ctx, &self.required_role)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_role_proceeds() {
        let jp = JoinPoint::new("call_llm").with_meta(ROLES_METADATA_KEY, "op");
        assert_eq!(
            authorization_guard_before(&jp, "op"),
            AdviceOutcome::Proceed
        );
    }

    #[test]
    fn superset_of_roles_proceeds() {
        let jp = JoinPoint::new("call_llm").with_meta(ROLES_METADATA_KEY, "admin, op");
        assert_eq!(
            authorization_guard_before(&jp, "op"),
            AdviceOutcome::Proceed
        );
    }

    #[test]
    fn empty_roles_halt() {
        let jp = JoinPoint::new("call_llm").with_meta(ROLES_METADATA_KEY, "");
        match authorization_guard_before(&jp, "op") {
            AdviceOutcome::Halt(e) => assert_eq!(e.category, ErrorCategory::AuthorizationDenied),
            other => panic!("expected halt, got {other:?}"),
        }
    }

    #[test]
    fn missing_principal_halts_with_detail() {
        let jp = JoinPoint::new("call_llm");
        match authorization_guard_before(&jp, "op") {
            AdviceOutcome::Halt(e) => {
                assert_eq!(e.category, ErrorCategory::AuthorizationDenied);
                assert!(e.message.contains("no principal"));
            }
            other => panic!("expected halt, got {other:?}"),
        }
    }
}
