//! Black-box objective abstraction and the benchmark registry.
//!
//! A [`Problem`] is an immutable box-constrained minimization target; a
//! [`Solution`] is a position together with its cached objective value.
//! Objective evaluations are counted per run through an [`EvalCounter`],
//! never on the problem itself, so a single `Problem` can be shared across
//! concurrent runs.

mod benchmarks;

pub use benchmarks::{benchmark, benchmark_names, benchmark_registry, BenchmarkSpec};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("position has {actual} components, problem `{name}` expects {expected}")]
    DimensionMismatch {
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error("bound {index}: lower {lower} must be strictly below upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
    #[error("bounds must have one entry per dimension ({dimension})")]
    BoundsLength { dimension: usize },
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("benchmark dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
}

/// A deterministic objective function: same input, same output.
pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An immutable box-constrained minimization problem.
#[derive(Clone)]
pub struct Problem {
    name: String,
    dimension: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    objective: Objective,
    known_optimum: Option<f64>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        objective: Objective,
        known_optimum: Option<f64>,
    ) -> Result<Self, ProblemError> {
        let dimension = lower.len();
        if upper.len() != dimension {
            return Err(ProblemError::BoundsLength { dimension });
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(ProblemError::InvalidBounds {
                    index,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            dimension,
            lower,
            upper,
            objective,
            known_optimum,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    /// Raw objective value at `position` (no counting, no bounds check).
    pub fn objective_value(&self, position: &[f64]) -> f64 {
        debug_assert_eq!(position.len(), self.dimension);
        (self.objective)(position)
    }

    /// Width of the box along dimension `i`.
    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Euclidean length of the box diagonal. Used to scale tabu radii,
    /// neighborhood radii, and step-size floors to the problem.
    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Projects each component of `position` onto its bound interval.
    pub fn clip(&self, position: &[f64]) -> Vec<f64> {
        debug_assert_eq!(position.len(), self.dimension);
        position
            .iter()
            .enumerate()
            .map(|(i, &x)| x.clamp(self.lower[i], self.upper[i]))
            .collect()
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dimension
            && position
                .iter()
                .enumerate()
                .all(|(i, &x)| x >= self.lower[i] && x <= self.upper[i])
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("known_optimum", &self.known_optimum)
            .finish()
    }
}

/// A position with its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub position: Vec<f64>,
    pub value: f64,
    /// Engine iteration at which the position was evaluated.
    pub birth_iteration: u64,
}

/// Per-run evaluation counter. Belongs to the run, not the problem.
#[derive(Debug, Default, Clone)]
pub struct EvalCounter {
    used: u64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

/// Evaluates `position` on `problem`, incrementing the run counter.
pub fn evaluate(
    problem: &Problem,
    counter: &mut EvalCounter,
    position: Vec<f64>,
    birth_iteration: u64,
) -> Result<Solution, ProblemError> {
    if position.len() != problem.dimension() {
        return Err(ProblemError::DimensionMismatch {
            name: problem.name().to_string(),
            expected: problem.dimension(),
            actual: position.len(),
        });
    }
    let value = problem.objective_value(&position);
    counter.used += 1;
    Ok(Solution {
        position,
        value,
        birth_iteration,
    })
}
