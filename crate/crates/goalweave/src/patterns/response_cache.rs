//! Response cache (`around` advice, budget stage).
//!
//! Memoizes successful results keyed by function name plus rendered
//! arguments, with a TTL. Errors are never cached; an expired entry is
//! recomputed in place.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use serde_json::Value;

use crate::aspect::{Aspect, AspectError, JoinPoint, ProceedFn, Stage};
use crate::clock::SharedClock;

struct CacheEntry {
    value: Value,
    stored_at: Duration,
}

/// Duplicate-call elimination for idempotent, costly targets.
pub struct ResponseCache {
    ttl: Duration,
    clock: SharedClock,
    entries: Mutex<HashMap<String, CacheEntry>>,
    hits: Mutex<u64>,
    misses: Mutex<u64>,
}

impl ResponseCache {
    pub fn new(ttl: Duration, clock: SharedClock) -> Self {
        assert!(!ttl.is_zero(), "ttl must be positive");
        Self {
            ttl,
            clock,
            entries: Mutex::new(HashMap::new()),
            hits: Mutex::new(0),
            misses: Mutex::new(0),
        }
    }

    pub fn hits(&self) -> u64 {
        *self.hits.lock().unwrap()
    }

    pub fn misses(&self) -> u64 {
        *self.misses.lock().unwrap()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn key(jp: &JoinPoint) -> String {
        format!("{}({})", jp.function_name, jp.rendered_args())
    }
}

impl Aspect for ResponseCache {
    fn name(&self) -> &str {
        super::names::RESPONSE_CACHE
    }

    fn stage(&self) -> Stage {
        Stage::Budget
    }

    fn around(&self, ctx: &JoinPoint, proceed: &mut ProceedFn<'_>) -> Result<Value, AspectError> {
        let key = Self::key(ctx);
        let now = self.clock.now();
        {
            let entries = self.entries.lock().unwrap();
            if let Some(entry) = entries.get(&key) {
                if now.saturating_sub(entry.stored_at) < self.ttl {
                    *self.hits.lock().unwrap() += 1;
                    return Ok(entry.value.clone());
                }
            }
        }
        *self.misses.lock().unwrap() += 1;
        let value = proceed(ctx)?;
        self.entries.lock().unwrap().insert(
            key,
            CacheEntry {
                value: value.clone(),
                stored_at: now,
            },
        );
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FakeClock;
    use serde_json::json;
    use std::sync::atomic::{AtomicU64, Ordering};

    #[test]
    fn repeat_call_with_same_args_hits_the_cache() {
        let clock = FakeClock::new();
        let cache = ResponseCache::new(Duration::from_secs(60), clock);
        let jp = JoinPoint::new("call_llm").with_arg("prompt", "hi");
        let invocations = AtomicU64::new(0);
        let mut target = |_: &JoinPoint| {
            invocations.fetch_add(1, Ordering::SeqCst);
            Ok(json!({ "text": "hello", "tokens": 5 }))
        };
        let first = cache.around(&jp, &mut target).unwrap();
        let second = cache.around(&jp, &mut target).unwrap();
        assert_eq!(first, second);
        assert_eq!(invocations.load(Ordering::SeqCst), 1);
        assert_eq!((cache.hits(), cache.misses()), (1, 1));
    }

    #[test]
    fn different_arguments_are_distinct_keys() {
        let cache = ResponseCache::new(Duration::from_secs(60), FakeClock::new());
        let mut target = |jp: &JoinPoint| Ok(json!(jp.rendered_args()));
        let a = cache
            .around(&JoinPoint::new("f").with_arg("q", "x"), &mut target)
            .unwrap();
        let b = cache
            .around(&JoinPoint::new("f").with_arg("q", "y"), &mut target)
            .unwrap();
        assert_ne!(a, b);
        assert_eq!(cache.misses(), 2);
    }

    #[test]
    fn expired_entries_are_recomputed() {
        let clock = FakeClock::new();
        let cache = ResponseCache::new(Duration::from_secs(60), clock.clone());
        let jp = JoinPoint::new("f").with_arg("q", "x");
        let invocations = AtomicU64::new(0);
        let mut target = |_: &JoinPoint| {
            invocations.fetch_add(1, Ordering::SeqCst);
            Ok(json!(invocations.load(Ordering::SeqCst)))
        };
        cache.around(&jp, &mut target).unwrap();
        clock.advance(Duration::from_secs(59));
        assert_eq!(cache.around(&jp, &mut target).unwrap(), json!(1));
        clock.advance(Duration::from_secs(1));
        assert_eq!(cache.around(&jp, &mut target).unwrap(), json!(2));
    }

    #[test]
    fn errors_are_not_cached() {
        let cache = ResponseCache::new(Duration::from_secs(60), FakeClock::new());
        let jp = JoinPoint::new("f").with_arg("q", "x");
        let invocations = AtomicU64::new(0);
        let mut target = |_: &JoinPoint| {
            if invocations.fetch_add(1, Ordering::SeqCst) == 0 {
                Err(AspectError::execution("transient"))
            } else {
                Ok(json!("recovered"))
            }
        };
        cache.around(&jp, &mut target).unwrap_err();
        assert_eq!(cache.around(&jp, &mut target).unwrap(), json!("recovered"));
        assert_eq!(invocations.load(Ordering::SeqCst), 2);
    }
}
