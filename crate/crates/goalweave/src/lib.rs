//! # goalweave
//!
//! A goals-to-aspects workbench for agentic AI systems:
//!
//! - [`goal_model`] parses and validates i* Strategic Dependency / Strategic
//!   Rationale models written in the `.istar` DSL.
//! - [`vgraph`] discovers crosscutting concerns: V-graph construction,
//!   crosscutting density, candidate grouping, scattering validation and
//!   pattern instantiation hints.
//! - [`aspect`] is the AOP runtime: join points, before/after/after_error/
//!   around advice, and aspect stacking in the canonical eight-stage order.
//! - [`patterns`] implements the twelve-pattern NFR catalog (authorization,
//!   validation, tool scoping, prompt guarding, circuit breaking, rate
//!   limiting, logging, performance monitoring, metrics, audit trails, token
//!   budgets, response caching).
//! - [`scattering`] measures concern scattering over real source trees,
//!   diffs snapshots, and applies precision adjustment.
//! - [`testbed`] is a mock agent pipeline used as the weaving fixture,
//!   including the before/after rate-limiting refactoring comparison.
//!
//! The `goalweave` binary exposes all of this as a small CLI; the crate's
//! `examples/` directory has one runnable example per capability.

pub mod aspect;
pub mod clock;
pub mod error;
pub mod goal_model;
pub mod patterns;
pub mod scattering;
pub mod testbed;
pub mod vgraph;

pub mod cli;

pub use error::WorkbenchError;
