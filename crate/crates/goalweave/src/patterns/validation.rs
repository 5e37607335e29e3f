//! Composable parameter checking (`around` advice, guard stage).

use std::sync::Arc;

use serde_json::Value;

use crate::aspect::{Aspect, AspectError, ErrorCategory, JoinPoint, ProceedFn, Stage};

type CheckFn = dyn Fn(&JoinPoint) -> Result<(), String> + Send + Sync;

/// A named parameter check.
#[derive(Clone)]
pub struct Validator {
    pub name: String,
    check: Arc<CheckFn>,
}

impl Validator {
    pub fn new(
        name: impl Into<String>,
        check: impl Fn(&JoinPoint) -> Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            check: Arc::new(check),
        }
    }

    /// Argument must be present and non-empty.
    pub fn non_empty(arg: &str) -> Self {
        let arg = arg.to_string();
        Self::new(format!("non-empty({arg})"), move |jp| match jp.arg(&arg) {
            Some(v) if !v.is_empty() => Ok(()),
            Some(_) => Err(format!("argument {arg:?} is empty")),
            None => Err(format!("argument {arg:?} is missing")),
        })
    }

    /// Argument must be at most `max` characters.
    pub fn max_length(arg: &str, max: usize) -> Self {
        let arg = arg.to_string();
        Self::new(format!("max-length({arg}, {max})"), move |jp| {
            match jp.arg(&arg) {
                Some(v) if v.chars().count() <= max => Ok(()),
                Some(v) => Err(format!(
                    "argument {arg:?} has {} characters, limit is {max}",
                    v.chars().count()
                )),
                None => Err(format!("argument {arg:?} is missing")),
            }
        })
    }
}

/// Run validators in order; the first failure halts, naming the validator.
pub fn run_validators(jp: &JoinPoint, validators: &[Validator]) -> Result<(), AspectError> {
    for validator in validators {
        if let Err(reason) = (validator.check)(jp) {
            return Err(AspectError::new(
                ErrorCategory::ValidationFailed,
                format!("{}: {reason}", validator.name),
            ));
        }
    }
    Ok(())
}

/// Ordered validator chain applied around the target.
pub struct InputValidation {
    validators: Vec<Validator>,
}

impl InputValidation {
    pub fn new(validators: Vec<Validator>) -> Self {
        Self { validators }
    }
}

impl Aspect for InputValidation {
    fn name(&self) -> &str {
        super::names::INPUT_VALIDATION
    }

    fn stage(&self) -> Stage {
        Stage::Guard
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        run_validators(ctx, &self.validators)?;
        proceed(ctx)
    }
}
