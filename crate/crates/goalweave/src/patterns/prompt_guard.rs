//! Prompt injection guard (`before` advice, guard stage).
//!
//! Scans the prompt argument against an ordered rule list before LLM calls.
//! Each rule carries an action: `reject` halts the call, `sanitize` rewrites
//! the matched text and continues, `alert_only` records the match and
//! continues. Every match is recorded for audit.
//!
//! The default ruleset covers three families — instruction-override phrases,
//! system-prompt override markers, and long base64-like runs — each
//! individually toggleable. The concrete patterns are this workbench's own;
//! tune them to the deployment (aggressive rules trade usability for
//! detection).

use std::sync::{Arc, Mutex};

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::aspect::{
    AdviceOutcome, Aspect, AspectError, ErrorCategory, JoinPoint, ProceedFn, Stage,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleAction {
    Reject,
    Sanitize,
    AlertOnly,
}

/// One injection-detection rule.
#[derive(Clone, Debug)]
pub struct GuardRule {
    pub name: String,
    pub matcher: Regex,
    pub action: RuleAction,
    pub enabled: bool,
}

impl GuardRule {
    pub fn new(name: impl Into<String>, pattern: &str, action: RuleAction) -> Self {
        Self {
            name: name.into(),
            matcher: Regex::new(pattern).expect("guard rule pattern must compile"),
            action,
            enabled: true,
        }
    }

    pub fn disabled(mut self) -> Self {
        self.enabled = false;
        self
    }
}

/// A recorded rule match.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardEvent {
    pub rule: String,
    pub action: RuleAction,
    pub function: String,
    pub excerpt: String,
}

/// Rule family names used by [`default_ruleset`].
pub const RULE_INSTRUCTION_OVERRIDE: &str = "instruction-override";
pub const RULE_SYSTEM_PROMPT_OVERRIDE: &str = "system-prompt-override";
pub const RULE_ENCODED_PAYLOAD: &str = "encoded-payload";

/// The shipped three-family ruleset.
pub fn default_ruleset() -> Vec<GuardRule> {
    vec![
        GuardRule::new(
            RULE_INSTRUCTION_OVERRIDE,
            r"(?i)\b(ignore|disregard|forget)\b.{0,40}\b(previous|prior|above|earlier|all)\b.{0,24}\binstructions?\b",
            RuleAction::Reject,
        ),
        GuardRule::new(
            RULE_SYSTEM_PROMPT_OVERRIDE,
            r"(?i)(you are now\b|new system prompt|\[system\]|<\|system\|>|act as the system)",
            RuleAction::Reject,
        ),
        GuardRule::new(
            RULE_ENCODED_PAYLOAD,
            r"[A-Za-z0-9+/]{64,}={0,2}",
            RuleAction::Reject,
        ),
    ]
}

/// Outcome of scanning one prompt.
#[derive(Clone, Debug, PartialEq)]
pub struct GuardScan {
    /// Halting rule, if a reject rule matched.
    pub rejected_by: Option<String>,
    /// Prompt after sanitize rewrites, if any rewrite happened.
    pub sanitized: Option<String>,
    pub events: Vec<GuardEvent>,
}

/// Scan `prompt` against `rules` in order.
///
/// Reject rules are order-sensitive: the first matching reject rule halts
/// the scan. Sanitize rules rewrite and the scan continues on the rewritten
/// text.
pub fn scan_prompt(prompt: &str, rules: &[GuardRule], function: &str) -> GuardScan {
    let mut text = prompt.to_string();
    let mut rewritten = false;
    let mut events = Vec::new();

    for rule in rules.iter().filter(|r| r.enabled) {
        let Some(m) = rule.matcher.find(&text) else {
            continue;
        };
        events.push(GuardEvent {
            rule: rule.name.clone(),
            action: rule.action,
            function: function.to_string(),
            excerpt: m.as_str().chars().take(60).collect(),
        });
        match rule.action {
            RuleAction::Reject => {
                return GuardScan {
                    rejected_by: Some(rule.name.clone()),
                    sanitized: rewritten.then_some(text),
                    events,
                };
            }
            RuleAction::Sanitize => {
                text = rule.matcher.replace_all(&text, "[filtered]").into_owned();
                rewritten = true;
            }
            RuleAction::AlertOnly => {}
        }
    }

    GuardScan {
        rejected_by: None,
        sanitized: rewritten.then_some(text),
        events,
    }
}

/// `before`-advice form of the guard: Halt on the first matching reject
/// rule, Proceed otherwise. Returns the recorded matches alongside the
/// outcome.
pub fn prompt_guard_before(
    jp: &JoinPoint,
    rules: &[GuardRule],
    prompt_arg: &str,
) -> (AdviceOutcome, Vec<GuardEvent>) {
    let Some(prompt) = jp.arg(prompt_arg).or_else(|| {
        jp.arguments.first().map(|a| a.rendered.as_str())
    }) else {
        return (AdviceOutcome::Proceed, Vec::new());
    };
    let scan = scan_prompt(prompt, rules, &jp.function_name);
    let outcome = match &scan.rejected_by {
        Some(rule) => AdviceOutcome::Halt(AspectError::new(
            ErrorCategory::PromptInjectionDetected,
            format!("rule {rule}"),
        )),
        None => AdviceOutcome::Proceed,
    };
    (outcome, scan.events)
}

/// Prompt guard pattern instance.
///
/// Detection and rejection run as `before` advice; sanitize rewrites are
/// carried by `around`, which re-invokes the chain with the rewritten
/// argument. Matches accumulate in a shared alert log.
pub struct PromptGuard {
    rules: Vec<GuardRule>,
    prompt_arg: String,
    alerts: Arc<Mutex<Vec<GuardEvent>>>,
}

impl PromptGuard {
    pub fn new(rules: Vec<GuardRule>) -> Self {
        Self {
            rules,
            prompt_arg: "prompt".to_string(),
            alerts: Arc::new(Mutex::new(Vec::new())),
        }
    }

    pub fn with_defaults() -> Self {
        Self::new(default_ruleset())
    }

    pub fn prompt_arg(mut self, arg: impl Into<String>) -> Self {
        self.prompt_arg = arg.into();
        self
    }

    /// All matches recorded so far (for audit).
    pub fn alerts(&self) -> Vec<GuardEvent> {
        self.alerts.lock().unwrap().clone()
    }

    fn prompt_of<'a>(&self, jp: &'a JoinPoint) -> Option<&'a str> {
        jp.arg(&self.prompt_arg)
            .or_else(|| jp.arguments.first().map(|a| a.rendered.as_str()))
    }
}

impl Aspect for PromptGuard {
    fn name(&self) -> &str {
        super::names::PROMPT_GUARD
    }

    fn stage(&self) -> Stage {
        Stage::Guard
    }

    /// Runs after `InputValidation` within the guard stage.
    fn intra_stage_rank(&self) -> u8 {
        1
    }

    fn before(&self, ctx: &JoinPoint) -> AdviceOutcome {
        let (outcome, events) = prompt_guard_before(ctx, &self.rules, &self.prompt_arg);
        self.alerts.lock().unwrap().extend(events);
        outcome
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        // Rejection already happened in `before`; only rewrites remain.
        if let Some(prompt) = self.prompt_of(ctx) {
            let scan = scan_prompt(prompt, &self.rules, &ctx.function_name);
            if let Some(sanitized) = scan.sanitized {
                let mut rewritten = ctx.clone();
                for arg in &mut rewritten.arguments {
                    if arg.name == self.prompt_arg {
                        arg.rendered = sanitized.clone();
                    }
                }
                return proceed(&rewritten);
            }
        }
        proceed(ctx)
    }
}
