//! Concern-scattering measurement over source trees.
//!
//! A concern is a named set of line patterns; scanning counts the files and
//! modules in which any pattern matches. Pattern specs choose their
//! matching discipline with a prefix:
//!
//! - `word:auth` — word-boundary-anchored token match, for short tokens
//!   that substring matching would over-count,
//! - `substring:tracing::` — plain substring,
//! - `regex:^use ` — full regular expression,
//! - `near:8:canonicalize,starts_with` — co-occurrence: all listed terms
//!   within any window of N consecutive lines,
//! - no prefix — substring.
//!
//! On top of raw scans sit [`compare`] (percent-point evolution deltas
//! between two snapshots) and [`adjust`] (precision-rate adjustment of file
//! counts, nearest-integer rounding half away from zero).

mod config;

pub use config::{default_concerns, load_concerns, ConcernConfig};

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::WorkbenchError;

/// One line-matching rule, compiled from its spec string.
#[derive(Clone, Debug)]
pub enum ConcernPattern {
    Word(Regex),
    Substring(String),
    Regex(Regex),
    /// All terms must occur (as substrings) within a window of `window`
    /// consecutive lines.
    Near { window: usize, terms: Vec<String> },
}

impl ConcernPattern {
    /// Compile a pattern spec such as `word:auth` or `near:8:a,b`.
    pub fn parse(spec: &str) -> Result<Self, WorkbenchError> {
        let bad = |msg: String| WorkbenchError::Config(format!("pattern {spec:?}: {msg}"));
        if let Some(token) = spec.strip_prefix("word:") {
            if token.is_empty() {
                return Err(bad("empty token".into()));
            }
            let re = Regex::new(&format!(r"\b{}\b", regex::escape(token)))
                .map_err(|e| bad(e.to_string()))?;
            Ok(ConcernPattern::Word(re))
        } else if let Some(sub) = spec.strip_prefix("substring:") {
            if sub.is_empty() {
                return Err(bad("empty substring".into()));
            }
            Ok(ConcernPattern::Substring(sub.to_string()))
        } else if let Some(re) = spec.strip_prefix("regex:") {
            Ok(ConcernPattern::Regex(
                Regex::new(re).map_err(|e| bad(e.to_string()))?,
            ))
        } else if let Some(rest) = spec.strip_prefix("near:") {
            let (window, terms) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected near:<lines>:<term,term,...>".into()))?;
            let window: usize = window.parse().map_err(|_| bad("window is not a number".into()))?;
            if window == 0 {
                return Err(bad("window must be at least 1".into()));
            }
            let terms: Vec<String> = terms
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect();
            if terms.len() < 2 {
                return Err(bad("co-occurrence needs at least two terms".into()));
            }
            Ok(ConcernPattern::Near { window, terms })
        } else {
            if spec.is_empty() {
                return Err(bad("empty pattern".into()));
            }
            Ok(ConcernPattern::Substring(spec.to_string()))
        }
    }

    fn matches_line(&self, line: &str) -> bool {
        match self {
            ConcernPattern::Word(re) | ConcernPattern::Regex(re) => re.is_match(line),
            ConcernPattern::Substring(sub) => line.contains(sub),
            ConcernPattern::Near { .. } => false,
        }
    }

    /// Whether the pattern matches anywhere in a file's lines.
    fn matches_file(&self, lines: &[&str]) -> bool {
        match self {
            ConcernPattern::Near { window, terms } => {
                for start in 0..lines.len() {
                    let end = (start + window).min(lines.len());
                    let chunk = &lines[start..end];
                    if terms
                        .iter()
                        .all(|term| chunk.iter().any(|line| line.contains(term.as_str())))
                    {
                        return true;
                    }
                }
                false
            }
            _ => lines.iter().any(|line| self.matches_line(line)),
        }
    }
}

/// A named crosscutting concern to scan for.
#[derive(Clone, Debug)]
pub struct ConcernDef {
    pub name: String,
    pub patterns: Vec<ConcernPattern>,
    /// File-name globs this concern applies to (`*` wildcard); empty means
    /// every scanned file.
    pub globs: Vec<String>,
}

impl ConcernDef {
    pub fn new(name: impl Into<String>, specs: &[&str]) -> Result<Self, WorkbenchError> {
        let name = name.into();
        if specs.is_empty() {
            return Err(WorkbenchError::Config(format!(
                "concern {name:?} has no patterns"
            )));
        }
        Ok(Self {
            name,
            patterns: specs
                .iter()
                .map(|s| ConcernPattern::parse(s))
                .collect::<Result<_, _>>()?,
            globs: Vec::new(),
        })
    }

    fn applies_to(&self, file_name: &str) -> bool {
        self.globs.is_empty() || self.globs.iter().any(|g| glob_match(g, file_name))
    }
}

/// Minimal `*`-wildcard matching against a file name.
fn glob_match(glob: &str, name: &str) -> bool {
    let pattern = format!(
        "^{}$",
        glob.split('*').map(regex::escape).collect::<Vec<_>>().join(".*")
    );
    Regex::new(&pattern).map(|re| re.is_match(name)).unwrap_or(false)
}

/// Per-concern scan result.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConcernScatter {
    pub file_count: u64,
    /// Percentage of total scanned files, unrounded.
    pub file_percent: f64,
    pub module_count: u64,
    pub files: Vec<String>,
    pub modules: BTreeSet<String>,
}

/// One scan snapshot.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScatterReport {
    pub snapshot_id: String,
    pub total_files: u64,
    pub total_modules: u64,
    pub concerns: BTreeMap<String, ConcernScatter>,
    /// Unreadable files, excluded from totals.
    pub warnings: Vec<String>,
}

impl ScatterReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn load(path: &Path) -> Result<Self, WorkbenchError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| WorkbenchError::Config(format!("report {path:?}: {e}")))
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        writeln!(
            out,
            "snapshot {} — {} files across {} modules",
            self.snapshot_id, self.total_files, self.total_modules
        )
        .unwrap();
        writeln!(out, "{:<24} {:>6} {:>7} {:>8}", "concern", "files", "%files", "modules").unwrap();
        for (name, c) in &self.concerns {
            writeln!(
                out,
                "{:<24} {:>6} {:>6.0}% {:>8}",
                name, c.file_count, c.file_percent, c.module_count
            )
            .unwrap();
        }
        for warning in &self.warnings {
            writeln!(out, "warning: {warning}").unwrap();
        }
        out
    }
}

/// Module attribution: the first `depth` directory components of the path
/// relative to the scan root; files directly under the root fall into
/// `(root)`.
pub fn module_of(relative: &Path, depth: usize) -> String {
    let components: Vec<String> = relative
        .parent()
        .map(|p| {
            p.components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect()
        })
        .unwrap_or_default();
    if components.is_empty() {
        "(root)".to_string()
    } else {
        components[..depth.clamp(1, components.len())].join("/")
    }
}

fn is_binary(bytes: &[u8]) -> bool {
    bytes.iter().take(8192).any(|&b| b == 0)
}

/// Scan a source tree for every concern. Deterministic: files visited in
/// sorted order, results independent of traversal order by construction
/// (per-concern sets are unions).
pub fn scan(
    root: &Path,
    concerns: &[ConcernDef],
    module_depth: usize,
    snapshot_id: &str,
) -> Result<ScatterReport, WorkbenchError> {
    if !root.is_dir() {
        return Err(WorkbenchError::Config(format!(
            "scan root {root:?} is not a directory"
        )));
    }

    let mut report = ScatterReport {
        snapshot_id: snapshot_id.to_string(),
        ..Default::default()
    };
    for concern in concerns {
        report.concerns.insert(concern.name.clone(), ConcernScatter::default());
    }

    let mut all_modules = BTreeSet::new();
    let mut entries: Vec<_> = WalkDir::new(root)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .collect();
    entries.sort();

    for path in entries {
        let relative = path.strip_prefix(root).unwrap_or(&path).to_path_buf();
        let mut bytes = Vec::new();
        match std::fs::File::open(&path).and_then(|mut f| f.read_to_end(&mut bytes)) {
            Ok(_) => {}
            Err(e) => {
                report.warnings.push(format!("{}: {e}", relative.display()));
                continue;
            }
        }
        if is_binary(&bytes) {
            continue;
        }
        let text = String::from_utf8_lossy(&bytes);
        let lines: Vec<&str> = text.lines().collect();
        let module = module_of(&relative, module_depth);
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();

        report.total_files += 1;
        all_modules.insert(module.clone());

        for concern in concerns {
            if !concern.applies_to(&file_name) {
                continue;
            }
            if concern.patterns.iter().any(|p| p.matches_file(&lines)) {
                let scatter = report
                    .concerns
                    .get_mut(&concern.name)
                    .expect("concern was pre-registered");
                scatter.files.push(relative.display().to_string());
                scatter.modules.insert(module.clone());
            }
        }
    }

    report.total_modules = all_modules.len() as u64;
    for scatter in report.concerns.values_mut() {
        scatter.files.sort();
        scatter.file_count = scatter.files.len() as u64;
        scatter.module_count = scatter.modules.len() as u64;
        scatter.file_percent = if report.total_files == 0 {
            0.0
        } else {
            100.0 * scatter.file_count as f64 / report.total_files as f64
        };
    }
    Ok(report)
}

/// Percent-point change of one concern between two snapshots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "pp")]
pub enum Delta {
    /// Whole percent points, later minus earlier.
    Change(i64),
    /// Concern measured in only one of the two snapshots.
    Incomparable,
}

/// Evolution diff between two scan snapshots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionDelta {
    pub earlier: String,
    pub later: String,
    pub deltas: BTreeMap<String, Delta>,
}

/// Diff two snapshots concern by concern.
pub fn compare(earlier: &ScatterReport, later: &ScatterReport) -> EvolutionDelta {
    let names: BTreeSet<&String> = earlier.concerns.keys().chain(later.concerns.keys()).collect();
    let deltas = names
        .into_iter()
        .map(|name| {
            let delta = match (earlier.concerns.get(name), later.concerns.get(name)) {
                (Some(e), Some(l)) => {
                    Delta::Change(round_half_away(l.file_percent - e.file_percent))
                }
                _ => Delta::Incomparable,
            };
            (name.clone(), delta)
        })
        .collect();
    EvolutionDelta {
        earlier: earlier.snapshot_id.clone(),
        later: later.snapshot_id.clone(),
        deltas,
    }
}

fn round_half_away(x: f64) -> i64 {
    x.round() as i64
}

/// Manually-validated precision rates per concern.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrecisionAdjustment {
    pub rates: BTreeMap<String, f64>,
}

impl PrecisionAdjustment {
    pub fn insert(&mut self, concern: impl Into<String>, rate: f64) {
        self.rates.insert(concern.into(), rate);
    }

    pub fn load(path: &Path) -> Result<Self, WorkbenchError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| WorkbenchError::Config(format!("precision rates {path:?}: {e}")))
    }
}

/// One precision-adjusted estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjustedEstimate {
    pub file_count: u64,
    pub precision: f64,
    /// `round(file_count × precision)`, half away from zero.
    pub adjusted: u64,
}

/// Apply precision rates to a report's file counts.
pub fn adjust(
    report: &ScatterReport,
    rates: &PrecisionAdjustment,
) -> Result<BTreeMap<String, AdjustedEstimate>, WorkbenchError> {
    let mut out = BTreeMap::new();
    for (concern, &rate) in &rates.rates {
        if !(0.0..=1.0).contains(&rate) {
            return Err(WorkbenchError::InvalidPrecisionRate(rate));
        }
        let Some(scatter) = report.concerns.get(concern) else {
            continue;
        };
        out.insert(
            concern.clone(),
            AdjustedEstimate {
                file_count: scatter.file_count,
                precision: rate,
                adjusted: (scatter.file_count as f64 * rate).round() as u64,
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(root: &Path, rel: &str, content: &str) {
        let path = root.join(rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, content).unwrap();
    }

    fn report_with(concern: &str, percent: f64, snapshot: &str) -> ScatterReport {
        let mut report = ScatterReport {
            snapshot_id: snapshot.to_string(),
            total_files: 100,
            total_modules: 10,
            ..Default::default()
        };
        report.concerns.insert(
            concern.to_string(),
            ConcernScatter {
                file_count: percent as u64,
                file_percent: percent,
                ..Default::default()
            },
        );
        report
    }

    #[test]
    fn word_mode_is_boundary_anchored() {
        let p = ConcernPattern::parse("word:auth").unwrap();
        assert!(p.matches_line("fn auth() {}"));
        assert!(p.matches_line("check(auth, token)"));
        assert!(!p.matches_line("authorize(user)"));
        assert!(!p.matches_line("let oauth_token = 1;"));
        assert!(!p.matches_line("auth_token")); // underscore is a word char
    }

    #[test]
    fn substring_and_regex_modes() {
        let sub = ConcernPattern::parse("substring:tracing::").unwrap();
        assert!(sub.matches_line("    tracing::info!(\"x\");"));
        assert!(!sub.matches_line("trace::info"));
        let bare = ConcernPattern::parse("info!").unwrap();
        assert!(bare.matches_line("info!(\"hello\")"));
        let re = ConcernPattern::parse("regex:^use std::").unwrap();
        assert!(re.matches_line("use std::fs;"));
        assert!(!re.matches_line("  use std::fs;"));
    }

    #[test]
    fn near_mode_requires_all_terms_in_one_window() {
        let p = ConcernPattern::parse("near:3:canonicalize,starts_with").unwrap();
        let close = ["let p = canonicalize(x);", "if p.starts_with(root) {", "}"];
        assert!(p.matches_file(&close));
        let far = [
            "let p = canonicalize(x);",
            "",
            "",
            "",
            "if p.starts_with(root) {",
        ];
        assert!(!p.matches_file(&far));
    }

    #[test]
    fn malformed_pattern_specs_are_rejected() {
        for bad in ["word:", "regex:(", "near:0:a,b", "near:5:only_one", ""] {
            assert!(ConcernPattern::parse(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn scan_counts_files_once_and_attributes_modules() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "core/a.rs", "fn auth() {}\nauth();\nauth();\n");
        write(root, "core/b.rs", "fn other() {}\n");
        write(root, "tools/c.rs", "// auth check\n");
        write(root, "top.rs", "auth();\n");
        let concerns = vec![ConcernDef::new("auth", &["word:auth"]).unwrap()];
        let report = scan(root, &concerns, 1, "t").unwrap();
        assert_eq!(report.total_files, 4);
        assert_eq!(report.total_modules, 3); // core, tools, (root)
        let c = &report.concerns["auth"];
        // a.rs matches three times but counts once.
        assert_eq!(c.file_count, 3);
        assert_eq!(c.module_count, 3);
        assert_eq!(c.files, ["core/a.rs", "tools/c.rs", "top.rs"]);
    }

    #[test]
    fn binary_files_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "a.rs", "auth();\n");
        fs::write(root.join("blob.bin"), b"auth\x00auth").unwrap();
        let concerns = vec![ConcernDef::new("auth", &["word:auth"]).unwrap()];
        let report = scan(root, &concerns, 1, "t").unwrap();
        assert_eq!(report.total_files, 1);
        assert_eq!(report.concerns["auth"].file_count, 1);
    }

    #[test]
    fn concern_without_matches_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.rs", "fn main() {}\n");
        let concerns = vec![ConcernDef::new("ghost", &["word:nonexistent"]).unwrap()];
        let report = scan(dir.path(), &concerns, 1, "t").unwrap();
        let c = &report.concerns["ghost"];
        assert_eq!((c.file_count, c.module_count), (0, 0));
    }

    #[test]
    fn globs_narrow_the_scanned_files() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.rs", "auth();\n");
        write(dir.path(), "a.md", "auth\n");
        let mut concern = ConcernDef::new("auth", &["word:auth"]).unwrap();
        concern.globs = vec!["*.rs".to_string()];
        let report = scan(dir.path(), &[concern], 1, "t").unwrap();
        assert_eq!(report.concerns["auth"].file_count, 1);
        assert_eq!(report.total_files, 2);
    }

    #[test]
    fn adding_an_unmatched_file_changes_percent_not_counts() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.rs", "auth();\n");
        let concerns = vec![ConcernDef::new("auth", &["word:auth"]).unwrap()];
        let before = scan(dir.path(), &concerns, 1, "t").unwrap();
        write(dir.path(), "b.rs", "fn main() {}\n");
        let after = scan(dir.path(), &concerns, 1, "t").unwrap();
        assert_eq!(
            before.concerns["auth"].file_count,
            after.concerns["auth"].file_count
        );
        assert!(after.concerns["auth"].file_percent < before.concerns["auth"].file_percent);
        assert_eq!(after.total_files, before.total_files + 1);
    }

    #[test]
    fn compare_identical_reports_is_zero() {
        let r = report_with("configuration", 50.0, "v1");
        let delta = compare(&r, &r);
        assert_eq!(delta.deltas["configuration"], Delta::Change(0));
    }

    #[test]
    fn fifty_to_sixty_four_percent_is_plus_fourteen_points() {
        let v1 = report_with("configuration", 50.0, "v1");
        let v4 = report_with("configuration", 64.0, "v4");
        let delta = compare(&v1, &v4);
        assert_eq!(delta.deltas["configuration"], Delta::Change(14));
    }

    #[test]
    fn one_sided_concern_is_incomparable() {
        let v1 = report_with("configuration", 50.0, "v1");
        let v4 = report_with("cost_tracking", 21.0, "v4");
        let delta = compare(&v1, &v4);
        assert_eq!(delta.deltas["configuration"], Delta::Incomparable);
        assert_eq!(delta.deltas["cost_tracking"], Delta::Incomparable);
    }

    #[test]
    fn precision_adjustment_reproduces_the_validated_estimates() {
        let mut report = ScatterReport::default();
        for (name, count) in [("security_auth", 104u64), ("rate_limiting", 29), ("path_validation", 68)] {
            report.concerns.insert(
                name.to_string(),
                ConcernScatter {
                    file_count: count,
                    ..Default::default()
                },
            );
        }
        let mut rates = PrecisionAdjustment::default();
        rates.insert("security_auth", 0.80);
        rates.insert("rate_limiting", 0.64);
        rates.insert("path_validation", 0.32);
        let adjusted = adjust(&report, &rates).unwrap();
        assert_eq!(adjusted["security_auth"].adjusted, 83);
        assert_eq!(adjusted["rate_limiting"].adjusted, 19);
        assert_eq!(adjusted["path_validation"].adjusted, 22);
    }

    #[test]
    fn out_of_range_precision_rate_is_rejected() {
        let mut report = ScatterReport::default();
        report
            .concerns
            .insert("c".to_string(), ConcernScatter::default());
        for bad in [-0.1, 1.5] {
            let mut rates = PrecisionAdjustment::default();
            rates.insert("c", bad);
            assert!(matches!(
                adjust(&report, &rates),
                Err(WorkbenchError::InvalidPrecisionRate(_))
            ));
        }
    }

    #[test]
    fn report_round_trips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "core/a.rs", "auth();\n");
        let concerns = vec![ConcernDef::new("auth", &["word:auth"]).unwrap()];
        let report = scan(dir.path(), &concerns, 1, "snap").unwrap();
        let path = dir.path().join("report.json");
        fs::write(&path, report.to_json()).unwrap();
        assert_eq!(ScatterReport::load(&path).unwrap(), report);
    }
}
