//! The woven fixture: the same eight units with every inline limiter
//! deleted and the catalog `RateLimiter` woven around each join point.
//!
//! One algorithm, one error rendering, zero limiting code inside the
//! units. The only concern code left at each join point is the one-line
//! weaving declaration, and the pattern itself is shared library code.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::aspect::{canonical_order, weave, Advised, Aspect, JoinPoint};
use crate::clock::SharedClock;
use crate::patterns::{LimiterScope, RateLimiter};

use super::before::{
    GATEWAY_LIMIT, GATEWAY_WINDOW, SCHEDULER_CAPACITY, SCHEDULER_PERIOD, TOOL_LIMIT, TOOL_WINDOW,
};
use super::{
    all_units, unit_output, Algorithm, ConcernRegion, ErrorFormat, Measurable, RegionKind,
    GATEWAY_UNIT, SCHEDULER_UNIT, TOOL_UNITS,
};

/// The pipeline after refactoring: one limiter pattern, eight weavings.
pub struct AfterPipeline {
    units: BTreeMap<String, Advised>,
    regions: Vec<ConcernRegion>,
}

impl AfterPipeline {
    /// Dispatch a call to one of the eight units, same signature as the
    /// scattered pipeline. Rejections all come out as the pattern's one
    /// rendering.
    pub fn call(&self, unit: &str, arg: &str) -> Result<String, String> {
        let advised = self
            .units
            .get(unit)
            .ok_or_else(|| format!("unknown unit {unit}"))?;
        let jp = JoinPoint::new(unit).with_arg("input", arg);
        match advised.call(&jp) {
            Ok(value) => Ok(value.as_str().unwrap_or_default().to_string()),
            Err(err) => Err(err.message),
        }
    }
}

impl Measurable for AfterPipeline {
    fn regions(&self) -> &[ConcernRegion] {
        &self.regions
    }
}

fn wire(units: &mut BTreeMap<String, Advised>, unit: &'static str, limiter: &Arc<RateLimiter>) {
    let stack = canonical_order(vec![limiter.clone() as Arc<dyn Aspect>]);
    let advised = weave(unit, stack, move |jp| {
        let arg = jp.arg("input").unwrap_or_default();
        Ok(serde_json::json!(unit_output(&jp.function_name, &arg)))
    });
    units.insert(unit.to_string(), advised);
}

/// Build the woven fixture: the same limits as the scattered one, all
/// enforced by `RateLimiter` instances.
pub fn build_after_fixture(clock: SharedClock) -> AfterPipeline {
    let tools = Arc::new(RateLimiter::new(
        TOOL_LIMIT as u64,
        TOOL_WINDOW,
        LimiterScope::PerFunction,
        clock.clone(),
    ));
    let gateway = Arc::new(RateLimiter::new(
        GATEWAY_LIMIT as u64,
        GATEWAY_WINDOW,
        LimiterScope::PerFunction,
        clock.clone(),
    ));
    let scheduler = Arc::new(RateLimiter::new(
        SCHEDULER_CAPACITY as u64,
        SCHEDULER_PERIOD,
        LimiterScope::PerFunction,
        clock,
    ));

    let mut units = BTreeMap::new();
    for tool in TOOL_UNITS {
        wire(&mut units, tool, &tools);
    }
    wire(&mut units, GATEWAY_UNIT, &gateway);
    wire(&mut units, SCHEDULER_UNIT, &scheduler);

    // One shared implementation (library code: zero lines at the join
    // points) plus a one-line weaving declaration per unit.
    let mut regions = vec![ConcernRegion {
        unit: "patterns".to_string(),
        kind: RegionKind::Implementation,
        loc: 0,
        algorithm: Some(Algorithm::FixedWindow),
        error_format: Some(ErrorFormat::AspectError),
    }];
    for unit in all_units() {
        regions.push(ConcernRegion {
            unit: unit.to_string(),
            kind: RegionKind::Annotation,
            loc: 1,
            algorithm: None,
            error_format: None,
        });
    }

    AfterPipeline { units, regions }
}
