//! Concern configuration: the shipped default concern set and the config
//! file loader.
//!
//! The default set covers eleven concerns. The security and logging keyword
//! lists are the measured ones; the other nine are our approximations and
//! are meant to be overridden per codebase with a `--concerns` file.

use std::path::Path;

use serde::Deserialize;

use super::{ConcernDef, ConcernPattern};
use crate::error::WorkbenchError;

#[derive(Debug, Deserialize)]
struct RawConcern {
    name: String,
    patterns: Vec<String>,
    #[serde(default)]
    globs: Vec<String>,
}

/// Concern config file: a list of `[[concern]]` blocks.
#[derive(Debug, Deserialize)]
pub struct ConcernConfig {
    #[serde(rename = "concern")]
    concerns: Vec<RawConcern>,
}

impl ConcernConfig {
    pub fn into_defs(self) -> Result<Vec<ConcernDef>, WorkbenchError> {
        self.concerns
            .into_iter()
            .map(|raw| {
                if raw.patterns.is_empty() {
                    return Err(WorkbenchError::Config(format!(
                        "concern {:?} has no patterns",
                        raw.name
                    )));
                }
                Ok(ConcernDef {
                    name: raw.name,
                    patterns: raw
                        .patterns
                        .iter()
                        .map(|s| ConcernPattern::parse(s))
                        .collect::<Result<_, _>>()?,
                    globs: raw.globs,
                })
            })
            .collect()
    }
}

/// Load concern definitions from a TOML config file.
pub fn load_concerns(path: &Path) -> Result<Vec<ConcernDef>, WorkbenchError> {
    let text = std::fs::read_to_string(path)?;
    let config: ConcernConfig = toml::from_str(&text)
        .map_err(|e| WorkbenchError::Config(format!("concern config {path:?}: {e}")))?;
    config.into_defs()
}

/// The default eleven-concern set for Rust source trees.
pub fn default_concerns() -> Vec<ConcernDef> {
    let mut defs = vec![
        ConcernDef::new(
            "error_handling",
            &["substring:.map_err", "substring:anyhow!", "substring:unwrap_or", "word:Err"],
        ),
        ConcernDef::new(
            "configuration",
            &["word:config", "substring:Config", "substring:env::var"],
        ),
        // Measured keyword list for security checks.
        ConcernDef::new(
            "security_auth",
            &[
                "word:allowed",
                "word:forbidden",
                "word:deny",
                "word:pairing",
                "word:secret",
                "word:auth",
            ],
        ),
        // Measured keyword list for logging.
        ConcernDef::new(
            "logging",
            &["substring:tracing::", "substring:info!", "substring:warn!", "substring:error!"],
        ),
        ConcernDef::new(
            "path_validation",
            &["substring:canonicalize", "near:8:canonicalize,starts_with", "substring:is_absolute"],
        ),
        ConcernDef::new(
            "retry_resilience",
            &["word:retry", "substring:backoff", "substring:max_retries"],
        ),
        ConcernDef::new(
            "rate_limiting",
            &["substring:rate_limit", "word:throttle", "substring:RateLimiter", "substring:sliding_window"],
        ),
        ConcernDef::new(
            "cost_tracking",
            &["substring:token_count", "substring:tokens_used", "word:budget", "word:cost"],
        ),
        ConcernDef::new(
            "hook_dispatch",
            &["word:hook", "substring:dispatch", "substring:on_event"],
        ),
        ConcernDef::new(
            "telemetry_metrics",
            &["word:metrics", "word:telemetry", "substring:histogram", "substring:counter"],
        ),
        ConcernDef::new(
            "approval_hitl",
            &["word:approval", "substring:require_approval", "substring:human_in_the_loop"],
        ),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .expect("default patterns compile");
    for def in &mut defs {
        def.globs = vec!["*.rs".to_string()];
    }
    defs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_has_eleven_concerns() {
        let defs = default_concerns();
        assert_eq!(defs.len(), 11);
        assert!(defs.iter().all(|d| !d.patterns.is_empty()));
        assert!(defs.iter().any(|d| d.name == "security_auth"));
        assert!(defs.iter().any(|d| d.name == "logging"));
    }

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("concerns.toml");
        std::fs::write(
            &path,
            r#"
            [[concern]]
            name = "auth"
            patterns = ["word:auth", "substring:Authorization"]
            globs = ["*.rs"]

            [[concern]]
            name = "logging"
            patterns = ["substring:info!"]
            "#,
        )
        .unwrap();
        let defs = load_concerns(&path).unwrap();
        assert_eq!(defs.len(), 2);
        assert_eq!(defs[0].name, "auth");
        assert_eq!(defs[0].patterns.len(), 2);
        assert_eq!(defs[0].globs, ["*.rs"]);
        assert!(defs[1].globs.is_empty());
    }

    #[test]
    fn config_with_empty_pattern_list_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("concerns.toml");
        std::fs::write(&path, "[[concern]]\nname = \"x\"\npatterns = []\n").unwrap();
        assert!(load_concerns(&path).is_err());
    }
}
