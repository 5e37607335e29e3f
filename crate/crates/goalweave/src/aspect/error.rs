use std::fmt;

use serde::{Deserialize, Serialize};

/// Category of an advice or target failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorCategory {
    AuthorizationDenied,
    ValidationFailed,
    ScopeViolation,
    PromptInjectionDetected,
    CircuitOpen,
    RateLimited,
    BudgetExceeded,
    /// Failure raised by the target itself (or a generic execution error).
    Execution,
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorCategory::AuthorizationDenied => "authorization denied",
            ErrorCategory::ValidationFailed => "validation failed",
            ErrorCategory::ScopeViolation => "scope violation",
            ErrorCategory::PromptInjectionDetected => "prompt injection detected",
            ErrorCategory::CircuitOpen => "circuit open",
            ErrorCategory::RateLimited => "rate limited",
            ErrorCategory::BudgetExceeded => "budget exceeded",
            ErrorCategory::Execution => "execution error",
        };
        f.write_str(s)
    }
}

/// Error produced while executing an advised call.
///
/// Carries a non-empty category and message, plus the name of the aspect it
/// originated from once it has passed through the weaver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
pub struct AspectError {
    pub category: ErrorCategory,
    pub message: String,
    /// Originating aspect, filled in by the weaver if the advice left it
    /// unset.
    pub aspect: Option<String>,
}

impl AspectError {
    pub fn new(category: ErrorCategory, message: impl Into<String>) -> Self {
        let message = message.into();
        debug_assert!(!message.is_empty(), "halt errors carry a message");
        Self {
            category,
            message,
            aspect: None,
        }
    }

    pub fn execution(message: impl Into<String>) -> Self {
        Self::new(ErrorCategory::Execution, message)
    }

    pub fn from_aspect(mut self, name: &str) -> Self {
        self.aspect = Some(name.to_string());
        self
    }
}

impl fmt::Display for AspectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.aspect {
            Some(aspect) => write!(f, "{} ({}): {}", self.category, aspect, self.message),
            None => write!(f, "{}: {}", self.category, self.message),
        }
    }
}
