use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One named argument of an intercepted invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Argument {
    pub name: String,
    /// String rendering used for logging, cache keys and pattern matching.
    pub rendered: String,
    /// Optional typed payload for advice that needs structure.
    pub payload: Option<Value>,
}

/// An interceptable invocation context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoinPoint {
    pub function_name: String,
    pub arguments: Vec<Argument>,
    pub session_id: Option<String>,
    pub metadata: BTreeMap<String, String>,
}

impl JoinPoint {
    pub fn new(function_name: impl Into<String>) -> Self {
        let function_name = function_name.into();
        debug_assert!(!function_name.is_empty(), "join points name a function");
        Self {
            function_name,
            arguments: Vec::new(),
            session_id: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_arg(mut self, name: impl Into<String>, rendered: impl Into<String>) -> Self {
        self.arguments.push(Argument {
            name: name.into(),
            rendered: rendered.into(),
            payload: None,
        });
        self
    }

    pub fn with_session(mut self, session: impl Into<String>) -> Self {
        self.session_id = Some(session.into());
        self
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn arg(&self, name: &str) -> Option<&str> {
        self.arguments
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.rendered.as_str())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    /// Stable rendering of the argument list, used for cache keys and logs.
    pub fn rendered_args(&self) -> String {
        self.arguments
            .iter()
            .map(|a| format!("{}={}", a.name, a.rendered))
            .collect::<Vec<_>>()
            .join(", ")
    }
}
