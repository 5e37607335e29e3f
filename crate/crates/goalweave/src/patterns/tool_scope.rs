//! Tool-scope sandbox (`before` advice, scope stage).
//!
//! Contains agent actions within configured boundaries: filesystem path
//! prefixes, a command allowlist, and allowed network domains. The join
//! point's metadata declares the operation class (`path`, `command`, `url`)
//! and the operand to check.

use std::collections::BTreeSet;
use std::path::{Component, Path, PathBuf};

use url::Url;

use crate::aspect::{AdviceOutcome, Aspect, AspectError, ErrorCategory, JoinPoint, Stage};

/// Metadata key naming the operation class.
pub const OPERATION_METADATA_KEY: &str = "operation";
/// Metadata key carrying the operand (a path, command line, or URL).
pub const OPERAND_METADATA_KEY: &str = "operand";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperationClass {
    Path,
    Command,
    Url,
}

impl OperationClass {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "path" => Some(OperationClass::Path),
            "command" => Some(OperationClass::Command),
            "url" => Some(OperationClass::Url),
            _ => None,
        }
    }
}

/// Scope boundaries for agent tool execution.
#[derive(Clone, Debug, Default)]
pub struct ToolScopeConfig {
    /// Path prefixes in canonical absolute form.
    allowed_paths: Vec<PathBuf>,
    command_allowlist: BTreeSet<String>,
    /// Domain suffixes; `example.org` admits `api.example.org` but not
    /// `badexample.org`.
    allowed_domains: Vec<String>,
}

impl ToolScopeConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn allow_path(mut self, path: impl AsRef<Path>) -> Self {
        if let Some(normalized) = normalize_path(path.as_ref()) {
            self.allowed_paths.push(normalized);
        }
        self
    }

    pub fn allow_command(mut self, command: impl Into<String>) -> Self {
        self.command_allowlist.insert(command.into());
        self
    }

    pub fn allow_domain(mut self, domain: impl Into<String>) -> Self {
        self.allowed_domains.push(domain.into());
        self
    }
}

/// Lexically canonicalize an absolute path: resolve `.` and `..` without
/// touching the filesystem, so never-created paths can still be checked.
fn normalize_path(path: &Path) -> Option<PathBuf> {
    if !path.is_absolute() {
        return None;
    }
    let mut out = PathBuf::new();
    for component in path.components() {
        match component {
            Component::RootDir | Component::Prefix(_) => out.push(component.as_os_str()),
            Component::CurDir => {}
            Component::ParentDir => {
                // Popping past the root resolves to the root.
                out.pop();
                if out.as_os_str().is_empty() {
                    out.push(Component::RootDir.as_os_str());
                }
            }
            Component::Normal(c) => out.push(c),
        }
    }
    if out.as_os_str().is_empty() {
        out.push(Component::RootDir.as_os_str());
    }
    Some(out)
}

fn path_within(candidate: &Path, prefix: &Path) -> bool {
    candidate.starts_with(prefix)
}

fn violation(message: impl Into<String>) -> AdviceOutcome {
    AdviceOutcome::Halt(AspectError::new(ErrorCategory::ScopeViolation, message))
}

/// Check the requested operation against the configured scope boundaries.
pub fn tool_scope_before(jp: &JoinPoint, cfg: &ToolScopeConfig) -> AdviceOutcome {
    let Some(class) = jp.meta(OPERATION_METADATA_KEY).and_then(OperationClass::parse) else {
        return violation("malformed operand: missing or unknown operation class");
    };
    let Some(operand) = jp.meta(OPERAND_METADATA_KEY) else {
        return violation("malformed operand: no operand declared");
    };

    match class {
        OperationClass::Path => {
            let Some(normalized) = normalize_path(Path::new(operand)) else {
                return violation(format!("malformed operand: {operand:?} is not absolute"));
            };
            if cfg
                .allowed_paths
                .iter()
                .any(|prefix| path_within(&normalized, prefix))
            {
                AdviceOutcome::Proceed
            } else {
                violation(format!("path {} escapes allowed paths", normalized.display()))
            }
        }
        OperationClass::Command => {
            let Some(program) = operand.split_whitespace().next() else {
                return violation("malformed operand: empty command");
            };
            if cfg.command_allowlist.contains(program) {
                AdviceOutcome::Proceed
            } else {
                violation(format!("command {program:?} is not allowlisted"))
            }
        }
        OperationClass::Url => {
            let Ok(parsed) = Url::parse(operand) else {
                return violation(format!("malformed operand: {operand:?} is not a URL"));
            };
            let Some(host) = parsed.host_str() else {
                return violation(format!("malformed operand: {operand:?} has no host"));
            };
            let admitted = cfg.allowed_domains.iter().any(|domain| {
                host == domain || host.ends_with(&format!(".{domain}"))
            });
            if admitted {
                AdviceOutcome::Proceed
            } else {
                violation(format!("host {host:?} is outside allowed domains"))
            }
        }
    }
}

/// Scope enforcement applied before tool execution.
pub struct ToolScopeSandbox {
    config: ToolScopeConfig,
}

impl ToolScopeSandbox {
    pub fn new(config: ToolScopeConfig) -> Self {
        Self { config }
    }
}

impl Aspect for ToolScopeSandbox {
    fn name(&self) -> &str {
        super::names::TOOL_SCOPE_SANDBOX
    }

    fn stage(&self) -> Stage {
        Stage::Scope
    }

    fn before(&self, ctx: &JoinPoint) -> AdviceOutcome {
        tool_scope_before(ctx, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(class: &str, operand: &str) -> JoinPoint {
        JoinPoint::new("tool")
            .with_meta(OPERATION_METADATA_KEY, class)
            .with_meta(OPERAND_METADATA_KEY, operand)
    }

    #[test]
    fn dotdot_is_resolved_before_prefix_matching() {
        let cfg = ToolScopeConfig::new().allow_path("/work");
        assert_eq!(
            tool_scope_before(&jp("path", "/work/a/../b"), &cfg),
            AdviceOutcome::Proceed
        );
        // Escapes the prefix after normalization.
        assert!(matches!(
            tool_scope_before(&jp("path", "/work/../etc/passwd"), &cfg),
            AdviceOutcome::Halt(_)
        ));
    }

    #[test]
    fn sibling_directory_with_shared_prefix_is_rejected() {
        let cfg = ToolScopeConfig::new().allow_path("/work");
        assert!(matches!(
            tool_scope_before(&jp("path", "/workspace/x"), &cfg),
            AdviceOutcome::Halt(_)
        ));
    }

    #[test]
    fn command_allowlist_checks_the_first_token() {
        let cfg = ToolScopeConfig::new().allow_command("ls").allow_command("cat");
        assert_eq!(
            tool_scope_before(&jp("command", "ls -la /tmp"), &cfg),
            AdviceOutcome::Proceed
        );
        match tool_scope_before(&jp("command", "rm -rf /"), &cfg) {
            AdviceOutcome::Halt(e) => assert_eq!(e.category, ErrorCategory::ScopeViolation),
            other => panic!("expected halt, got {other:?}"),
        }
    }

    #[test]
    fn domain_suffix_match_requires_a_dot_boundary() {
        let cfg = ToolScopeConfig::new().allow_domain("example.org");
        assert_eq!(
            tool_scope_before(&jp("url", "https://api.example.org/x"), &cfg),
            AdviceOutcome::Proceed
        );
        assert_eq!(
            tool_scope_before(&jp("url", "https://example.org/"), &cfg),
            AdviceOutcome::Proceed
        );
        assert!(matches!(
            tool_scope_before(&jp("url", "https://badexample.org/"), &cfg),
            AdviceOutcome::Halt(_)
        ));
    }

    #[test]
    fn malformed_operands_halt() {
        let cfg = ToolScopeConfig::new().allow_path("/work");
        for bad in [
            jp("path", "relative/path"),
            jp("url", "not a url"),
            JoinPoint::new("tool").with_meta(OPERATION_METADATA_KEY, "path"),
            JoinPoint::new("tool").with_meta(OPERATION_METADATA_KEY, "teleport"),
        ] {
            match tool_scope_before(&bad, &cfg) {
                AdviceOutcome::Halt(e) => {
                    assert_eq!(e.category, ErrorCategory::ScopeViolation)
                }
                other => panic!("expected halt, got {other:?}"),
            }
        }
    }
}
