//! Pace-adjustable search operators: arithmetic crossover, self-adaptive
//! mutation, and neighborhood-zone trial moves, each implementable in
//! normal, expand, and condense mode.
//!
//! Expand mode stretches the regions each operator reaches (diversification)
//! and condense mode focuses them (intensification); normal mode keeps the
//! textbook definitions. All operators are pure given an explicit random
//! source.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::memory::RecentnessMemory;
use crate::problems::Problem;
use crate::util::euclidean;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("operands have mismatched lengths {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("step size sigma[{index}] = {value} must be positive")]
    NonPositiveStepSize { index: usize, value: f64 },
}

/// The pace of an operator invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperationMode {
    Normal,
    Expand,
    Condense,
}

impl OperationMode {
    pub fn label(&self) -> &'static str {
        match self {
            OperationMode::Normal => "normal",
            OperationMode::Expand => "expand",
            OperationMode::Condense => "condense",
        }
    }
}

/// Mode-independent operator defaults, scaled to one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBaselines {
    /// r*: normal-mode neighborhood radius.
    pub radius: f64,
    /// m: number of neighborhood zones (annuli).
    pub zone_count: usize,
    pub trials_per_zone: usize,
    /// Multiplier applied to radii and step-size scales in expand mode.
    pub expand_multiplier: f64,
    /// Multiplier applied to radii and step-size scales in condense mode.
    pub condense_multiplier: f64,
    /// c: scales the self-adaptation learning rates tau and tau'.
    pub learning_rate: f64,
    /// Floor on mutated step sizes, preventing sigma collapse.
    pub theta_min: f64,
    /// Cap on mutated step sizes, preventing runaway growth under
    /// sustained expand-mode self-adaptation.
    pub theta_max: f64,
}

impl OperatorBaselines {
    pub fn for_problem(problem: &Problem) -> Self {
        let diagonal = problem.diagonal();
        Self {
            radius: 0.05 * diagonal,
            zone_count: 2,
            trials_per_zone: 3,
            expand_multiplier: 2.0,
            condense_multiplier: 0.5,
            learning_rate: 1.0,
            theta_min: 1e-8 * diagonal,
            theta_max: diagonal,
        }
    }
}

/// Interval from which the crossover coefficient lambda is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverParams {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl CrossoverParams {
    pub fn for_mode(mode: OperationMode) -> Self {
        let (lambda_min, lambda_max) = match mode {
            OperationMode::Normal => (0.0, 1.0),
            OperationMode::Expand => (-1.0, 1.0),
            OperationMode::Condense => (0.5, 1.0),
        };
        Self {
            lambda_min,
            lambda_max,
        }
    }

    pub fn sample_lambda<R: Rng>(&self, rng: &mut R) -> f64 {
        rng.random_range(self.lambda_min..=self.lambda_max)
    }
}

/// Learning rates and scaling of the self-adaptive mutation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationParams {
    /// tau: per-component learning rate, c / sqrt(2 sqrt(n)).
    pub tau: f64,
    /// tau': global learning rate, c / sqrt(2 n).
    pub tau_prime: f64,
    /// Multiplier on mutated step sizes; 1 in normal mode.
    pub sigma_scale: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl MutationParams {
    pub fn for_mode(mode: OperationMode, dimension: usize, baselines: &OperatorBaselines) -> Self {
        let n = dimension as f64;
        let c = baselines.learning_rate;
        let sigma_scale = match mode {
            OperationMode::Normal => 1.0,
            OperationMode::Expand => baselines.expand_multiplier,
            OperationMode::Condense => baselines.condense_multiplier,
        };
        Self {
            tau: c / (2.0 * n.sqrt()).sqrt(),
            tau_prime: c / (2.0 * n).sqrt(),
            sigma_scale,
            theta_min: baselines.theta_min,
            theta_max: baselines.theta_max,
        }
    }
}

/// Geometry of the neighborhood-zone trial generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodParams {
    pub radius: f64,
    pub zone_count: usize,
    pub trials_per_zone: usize,
}

impl NeighborhoodParams {
    pub fn for_mode(mode: OperationMode, baselines: &OperatorBaselines) -> Self {
        let radius = match mode {
            OperationMode::Normal => baselines.radius,
            OperationMode::Expand => baselines.radius * baselines.expand_multiplier,
            OperationMode::Condense => baselines.radius * baselines.condense_multiplier,
        };
        Self {
            radius,
            zone_count: baselines.zone_count,
            trials_per_zone: baselines.trials_per_zone,
        }
    }
}

/// The full parameter record of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeParams {
    pub crossover: CrossoverParams,
    pub mutation: MutationParams,
    pub neighborhood: NeighborhoodParams,
}

/// Parameter regimes for all three operators under one mode.
pub fn mode_params(
    mode: OperationMode,
    baselines: &OperatorBaselines,
    dimension: usize,
) -> ModeParams {
    ModeParams {
        crossover: CrossoverParams::for_mode(mode),
        mutation: MutationParams::for_mode(mode, dimension, baselines),
        neighborhood: NeighborhoodParams::for_mode(mode, baselines),
    }
}

/// Arithmetic crossover: y1 = lambda x1 + (1 - lambda) x2 and
/// y2 = (1 - lambda) x1 + lambda x2. The caller clips the children.
pub fn arithmetic_crossover(
    x1: &[f64],
    x2: &[f64],
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>), OperatorError> {
    if x1.len() != x2.len() {
        return Err(OperatorError::DimensionMismatch {
            left: x1.len(),
            right: x2.len(),
        });
    }
    let y1 = x1
        .iter()
        .zip(x2)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    let y2 = x1
        .iter()
        .zip(x2)
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    Ok((y1, y2))
}

/// Self-adaptive mutation. One global normal draw g is shared across
/// components; each component i then draws h_i and k_i independently:
///
///   theta_i = sigma_scale * sigma_i * exp(tau' g + tau h_i)
///   y_i     = x_i + theta_i k_i
///
/// Step sizes are clamped into [theta_min, theta_max]. Returns the mutated
/// position and its step-size vector.
pub fn self_adaptive_mutation<R: Rng>(
    x: &[f64],
    sigma: &[f64],
    params: &MutationParams,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>), OperatorError> {
    if x.len() != sigma.len() {
        return Err(OperatorError::DimensionMismatch {
            left: x.len(),
            right: sigma.len(),
        });
    }
    if let Some((index, &value)) = sigma.iter().enumerate().find(|(_, &s)| s.is_nan() || s <= 0.0) {
        return Err(OperatorError::NonPositiveStepSize { index, value });
    }
    let floor = params.theta_min.max(f64::MIN_POSITIVE);
    let global: f64 = rng.sample(StandardNormal);
    let mut y = Vec::with_capacity(x.len());
    let mut theta = Vec::with_capacity(x.len());
    for (&xi, &si) in x.iter().zip(sigma) {
        let local: f64 = rng.sample(StandardNormal);
        let step = (params.sigma_scale * si * (params.tau_prime * global + params.tau * local).exp())
            .clamp(floor, params.theta_max);
        let draw: f64 = rng.sample(StandardNormal);
        y.push(xi + step * draw);
        theta.push(step);
    }
    Ok((y, theta))
}

/// Trial points produced by [`neighborhood_trials`]. `dropped` counts points
/// abandoned after the per-point retry budget was exhausted.
#[derive(Debug, Clone)]
pub struct TrialSet {
    pub points: Vec<Vec<f64>>,
    pub dropped: usize,
}

impl TrialSet {
    pub fn exhausted(&self) -> bool {
        self.dropped > 0
    }
}

/// Retries per trial point before it is dropped.
const TRIAL_RETRIES: usize = 20;

/// Neighborhood trial moves around `center`: for zone i in 1..=m every
/// point p satisfies (i - 1) r < ||p - center|| <= i r. Points are clipped
/// to the problem box first; a point that clipping ejects from its zone, or
/// that lands within `tabu_radius` of a tabu-ring entry, is resampled.
pub fn neighborhood_trials<R: Rng>(
    problem: &Problem,
    center: &[f64],
    params: &NeighborhoodParams,
    tabu: &RecentnessMemory,
    tabu_radius: f64,
    rng: &mut R,
) -> TrialSet {
    let mut points = Vec::with_capacity(params.zone_count * params.trials_per_zone);
    let mut dropped = 0;
    for zone in 1..=params.zone_count {
        let inner = (zone - 1) as f64 * params.radius;
        let outer = zone as f64 * params.radius;
        for _ in 0..params.trials_per_zone {
            let mut accepted = None;
            for _ in 0..TRIAL_RETRIES {
                let direction = sample_unit_direction(center.len(), rng);
                // radius in (inner, outer]: 1 - u maps [0, 1) onto (0, 1]
                let radius = inner + (1.0 - rng.random::<f64>()) * (outer - inner);
                let raw: Vec<f64> = center
                    .iter()
                    .zip(&direction)
                    .map(|(c, d)| c + radius * d)
                    .collect();
                let clipped = problem.clip(&raw);
                let distance = euclidean(&clipped, center);
                if distance <= inner || distance > outer {
                    continue;
                }
                if tabu.is_tabu(&clipped, tabu_radius) {
                    continue;
                }
                accepted = Some(clipped);
                break;
            }
            match accepted {
                Some(point) => points.push(point),
                None => dropped += 1,
            }
        }
    }
    TrialSet { points, dropped }
}

/// Uniform direction on the unit sphere via normalized Gaussian draws.
pub(crate) fn sample_unit_direction<R: Rng>(dimension: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dimension).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::benchmark;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn crossover_hand_cases() {
        let (y1, y2) = arithmetic_crossover(&[0.0, 0.0], &[2.0, 4.0], 0.5).unwrap();
        assert_eq!(y1, vec![1.0, 2.0]);
        assert_eq!(y2, vec![1.0, 2.0]);

        let (y1, y2) = arithmetic_crossover(&[3.0, -1.0], &[2.0, 4.0], 1.0).unwrap();
        assert_eq!(y1, vec![3.0, -1.0]);
        assert_eq!(y2, vec![2.0, 4.0]);

        let (y1, y2) = arithmetic_crossover(&[0.0, 0.0], &[2.0, 4.0], 0.25).unwrap();
        assert_eq!(y1, vec![1.5, 3.0]);
        assert_eq!(y2, vec![0.5, 1.0]);
    }

    #[test]
    fn crossover_rejects_mismatched_lengths() {
        assert!(matches!(
            arithmetic_crossover(&[0.0], &[1.0, 2.0], 0.5),
            Err(OperatorError::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn crossover_conserves_component_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x1: Vec<f64> = (0..4).map(|_| rng.random_range(-100.0..100.0)).collect();
            let x2: Vec<f64> = (0..4).map(|_| rng.random_range(-100.0..100.0)).collect();
            let lambda = rng.random_range(-1.0..=1.0);
            let (y1, y2) = arithmetic_crossover(&x1, &x2, lambda).unwrap();
            for i in 0..4 {
                assert!(((y1[i] + y2[i]) - (x1[i] + x2[i])).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn expand_lambda_leaves_the_parent_hull() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = CrossoverParams::for_mode(OperationMode::Expand);
        let mut violated = false;
        for _ in 0..1000 {
            let x1: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x2: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let lambda = params.sample_lambda(&mut rng);
            let (y1, _) = arithmetic_crossover(&x1, &x2, lambda).unwrap();
            for i in 0..3 {
                let lo = x1[i].min(x2[i]);
                let hi = x1[i].max(x2[i]);
                if y1[i] < lo || y1[i] > hi {
                    violated = true;
                }
            }
        }
        assert!(violated, "expand mode never left the hull in 1000 draws");
    }

    #[test]
    fn normal_lambda_stays_in_the_parent_hull() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = CrossoverParams::for_mode(OperationMode::Normal);
        for _ in 0..1000 {
            let x1: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x2: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let lambda = params.sample_lambda(&mut rng);
            let (y1, y2) = arithmetic_crossover(&x1, &x2, lambda).unwrap();
            for i in 0..3 {
                let lo = x1[i].min(x2[i]) - 1e-12;
                let hi = x1[i].max(x2[i]) + 1e-12;
                assert!(y1[i] >= lo && y1[i] <= hi);
                assert!(y2[i] >= lo && y2[i] <= hi);
            }
        }
    }

    #[test]
    fn zero_learning_rates_leave_sigma_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = MutationParams {
            tau: 0.0,
            tau_prime: 0.0,
            sigma_scale: 1.0,
            theta_min: 0.0,
            theta_max: f64::INFINITY,
        };
        let sigma = vec![0.7, 1.3, 2.0];
        let (_, theta) = self_adaptive_mutation(&[0.0; 3], &sigma, &params, &mut rng).unwrap();
        assert_eq!(theta, sigma);
    }

    #[test]
    fn mutation_is_deterministic_under_a_seed() {
        let baselines = OperatorBaselines {
            radius: 1.0,
            zone_count: 3,
            trials_per_zone: 4,
            expand_multiplier: 2.0,
            condense_multiplier: 0.5,
            learning_rate: 1.0,
            theta_min: 1e-12,
            theta_max: 1e12,
        };
        let params = MutationParams::for_mode(OperationMode::Normal, 2, &baselines);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            self_adaptive_mutation(&[1.0, -1.0], &[0.5, 0.5], &params, &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn mutation_rejects_non_positive_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = MutationParams {
            tau: 0.1,
            tau_prime: 0.1,
            sigma_scale: 1.0,
            theta_min: 0.0,
            theta_max: f64::INFINITY,
        };
        let err = self_adaptive_mutation(&[0.0, 0.0], &[1.0, 0.0], &params, &mut rng).unwrap_err();
        assert!(matches!(
            err,
            OperatorError::NonPositiveStepSize { index: 1, .. }
        ));
    }

    #[test]
    fn mutation_steps_respect_floor_and_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let params = MutationParams {
            tau: 2.0,
            tau_prime: 2.0,
            sigma_scale: 1.0,
            theta_min: 0.5,
            theta_max: 1.5,
        };
        for _ in 0..100 {
            let (_, theta) =
                self_adaptive_mutation(&[0.0], &[1.0], &params, &mut rng).unwrap();
            assert!(theta[0] >= 0.5 && theta[0] <= 1.5);
        }
    }

    #[test]
    fn trials_land_in_their_zones() {
        let problem = benchmark("ackley", 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tabu = RecentnessMemory::new(4);
        let params = NeighborhoodParams {
            radius: 1.0,
            zone_count: 3,
            trials_per_zone: 5,
        };
        let center = vec![0.0; 3];
        let trials = neighborhood_trials(&problem, &center, &params, &tabu, 1e-6, &mut rng);
        assert_eq!(trials.points.len(), 15);
        assert!(!trials.exhausted());
        for (index, point) in trials.points.iter().enumerate() {
            let zone = index / 5 + 1;
            let distance = euclidean(point, &center);
            assert!(
                distance > (zone - 1) as f64 && distance <= zone as f64,
                "point {index} at distance {distance} outside zone {zone}"
            );
        }
    }

    #[test]
    fn single_zone_ball_excludes_the_center() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let tabu = RecentnessMemory::new(4);
        let params = NeighborhoodParams {
            radius: 0.5,
            zone_count: 1,
            trials_per_zone: 8,
        };
        let center = vec![1.0, 1.0];
        let trials = neighborhood_trials(&problem, &center, &params, &tabu, 1e-9, &mut rng);
        for point in &trials.points {
            let distance = euclidean(point, &center);
            assert!(distance > 0.0 && distance <= 0.5);
        }
    }

    #[test]
    fn blanket_tabu_exhausts_every_trial() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut tabu = RecentnessMemory::new(4);
        tabu.push(&[0.0, 0.0]);
        let params = NeighborhoodParams {
            radius: 0.5,
            zone_count: 2,
            trials_per_zone: 3,
        };
        // the tabu ball swallows every zone: radius >= m * r
        let trials = neighborhood_trials(&problem, &[0.0, 0.0], &params, &tabu, 5.0, &mut rng);
        assert!(trials.points.is_empty());
        assert_eq!(trials.dropped, 6);
        assert!(trials.exhausted());
    }

    #[test]
    fn mode_table_matches_the_three_regimes() {
        let problem = benchmark("sphere", 4).unwrap();
        let baselines = OperatorBaselines::for_problem(&problem);

        let normal = mode_params(OperationMode::Normal, &baselines, 4);
        assert_eq!(normal.crossover.lambda_min, 0.0);
        assert_eq!(normal.crossover.lambda_max, 1.0);
        assert_eq!(normal.mutation.sigma_scale, 1.0);
        assert_eq!(normal.neighborhood.radius, baselines.radius);

        let expand = mode_params(OperationMode::Expand, &baselines, 4);
        assert_eq!(expand.crossover.lambda_min, -1.0);
        assert_eq!(expand.mutation.sigma_scale, 2.0);
        assert_eq!(expand.neighborhood.radius, 2.0 * baselines.radius);

        let condense = mode_params(OperationMode::Condense, &baselines, 4);
        assert_eq!(condense.crossover.lambda_min, 0.5);
        assert_eq!(condense.mutation.sigma_scale, 0.5);
        assert_eq!(condense.neighborhood.radius, 0.5 * baselines.radius);

        assert!(expand.neighborhood.radius > normal.neighborhood.radius);
        assert!(normal.neighborhood.radius > condense.neighborhood.radius);

        // learning rates follow the proportionality forms at c = 1
        let n = 4.0f64;
        assert!((normal.mutation.tau_prime - 1.0 / (2.0 * n).sqrt()).abs() < 1e-15);
        assert!((normal.mutation.tau - 1.0 / (2.0 * n.sqrt()).sqrt()).abs() < 1e-15);
    }
}
