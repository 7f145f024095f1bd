//! Standard continuous benchmark functions with their conventional bounds.
//!
//! All entries are minimization problems with a known optimum of 0 and are
//! constructible at any dimension n >= 2.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use super::{Problem, ProblemError};

/// Sum of squares. Unimodal, optimum 0 at the origin. Bounds [-5.12, 5.12].
fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Banana valley. Optimum 0 at (1, ..., 1). Bounds [-5, 10].
fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

/// Highly multimodal cosine egg-carton (A = 10). Optimum 0 at the origin.
/// Bounds [-5.12, 5.12].
fn rastrigin(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    10.0 * n
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

/// Nearly flat outer region with a central funnel. Optimum 0 at the origin.
/// Bounds [-32.768, 32.768].
fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sum_sq: f64 = x.iter().map(|v| v * v).sum();
    let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    -20.0 * (-0.2 * (sum_sq / n).sqrt()).exp() - (sum_cos / n).exp() + 20.0 + E
}

/// Many widespread regular local minima. Optimum 0 at the origin.
/// Bounds [-600, 600].
fn griewank(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

/// A named benchmark family: conventional symmetric bounds plus the
/// objective, instantiable at any dimension n >= 2.
#[derive(Clone, Copy)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    /// Per-dimension (lower, upper) bound, identical across dimensions.
    pub bounds: (f64, f64),
    objective: fn(&[f64]) -> f64,
}

impl BenchmarkSpec {
    pub fn instantiate(&self, dimension: usize) -> Result<Problem, ProblemError> {
        if dimension < 2 {
            return Err(ProblemError::DimensionTooSmall(dimension));
        }
        let f = self.objective;
        Problem::new(
            self.name,
            vec![self.bounds.0; dimension],
            vec![self.bounds.1; dimension],
            Arc::new(move |x: &[f64]| f(x)),
            Some(0.0),
        )
    }
}

const REGISTRY: &[BenchmarkSpec] = &[
    BenchmarkSpec {
        name: "sphere",
        bounds: (-5.12, 5.12),
        objective: sphere,
    },
    BenchmarkSpec {
        name: "rosenbrock",
        bounds: (-5.0, 10.0),
        objective: rosenbrock,
    },
    BenchmarkSpec {
        name: "rastrigin",
        bounds: (-5.12, 5.12),
        objective: rastrigin,
    },
    BenchmarkSpec {
        name: "ackley",
        bounds: (-32.768, 32.768),
        objective: ackley,
    },
    BenchmarkSpec {
        name: "griewank",
        bounds: (-600.0, 600.0),
        objective: griewank,
    },
];

/// All registered benchmark families.
pub fn benchmark_registry() -> &'static [BenchmarkSpec] {
    REGISTRY
}

pub fn benchmark_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|spec| spec.name).collect()
}

/// Looks a benchmark up by name and instantiates it at `dimension`.
pub fn benchmark(name: &str, dimension: usize) -> Result<Problem, ProblemError> {
    REGISTRY
        .iter()
        .find(|spec| spec.name == name)
        .ok_or_else(|| ProblemError::UnknownBenchmark(name.to_string()))?
        .instantiate(dimension)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_hand_values() {
        assert_eq!(sphere(&[1.0, 2.0]), 5.0);
        assert_eq!(sphere(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn rosenbrock_hand_value() {
        // 100*(0 - 0)^2 + (1-0)^2 = 1 for the 2-D origin
        assert_eq!(rosenbrock(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn ackley_origin_is_zero_within_fp() {
        assert!(ackley(&[0.0; 10]).abs() < 1e-12);
    }

    #[test]
    fn griewank_origin() {
        assert!(griewank(&[0.0; 6]).abs() < 1e-12);
    }

    #[test]
    fn registry_has_the_standard_five() {
        let names = benchmark_names();
        for expected in ["sphere", "rosenbrock", "rastrigin", "ackley", "griewank"] {
            assert!(names.contains(&expected), "missing {expected}");
        }
    }
}
