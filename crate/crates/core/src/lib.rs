//! Deep heuristic search: classical metaheuristics wrapped in a multi-depth
//! search memory, pace-adjustable operators, and a five-stage strategic
//! pipeline, over continuous black-box benchmark problems.
//!
//! The crate is organized along the three components of the approach:
//!
//! - [`memory`] — the two-dimensional search memory: five diversity types
//!   (elitism, visit frequency, characteristics, spatiality, recentness)
//!   crossed with deep / shallow / extended-shallow temporal layers.
//! - [`operators`] — arithmetic crossover, self-adaptive mutation, and
//!   neighborhood-zone trials, each runnable in normal, expand, or condense
//!   mode.
//! - [`engine`] — the staged pipeline (initial, exploratory, mixed,
//!   intensive, final) steering one of the [`drivers`] (GA, ES, TS) through
//!   those modes with memory-driven restarts and termination.
//!
//! [`problems`] supplies the benchmark registry and evaluation plumbing;
//! [`report`] the reproducible run records.

pub mod drivers;
pub mod engine;
pub mod memory;
pub mod operators;
pub mod problems;
pub mod report;

pub(crate) mod util;

pub use drivers::{Driver, DriverConfig, DriverKind, Selection};
pub use engine::{run, run_plain, DhsRun, PlanError, StagePlan};
pub use memory::{MemoryBank, MemoryConfig, MemorySnapshot};
pub use operators::{OperationMode, OperatorBaselines};
pub use problems::{benchmark, benchmark_registry, Problem, ProblemError, Solution};
pub use report::{RunReport, StageTag, WrapperKind};
