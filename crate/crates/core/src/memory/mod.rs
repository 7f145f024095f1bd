//! The two-dimensional search memory: five diversity types (elitism, visit
//! frequency, characteristics, spatiality, recentness) crossed with deep /
//! shallow / extended-shallow temporal layers.
//!
//! A [`MemoryBank`] belongs to exactly one run. Every evaluated solution is
//! recorded into all five memories; [`MemoryBank::tick`] advances the
//! temporal depth indices once per engine iteration.

mod frequency;
mod grid;
mod layered;
mod recentness;
mod spatial;

pub use frequency::FrequencyMemory;
pub use grid::Grid;
pub use layered::{LayeredStore, RankedEntry, TimedEntry};
pub use recentness::RecentnessMemory;
pub use spatial::{Landmark, SpatialMemory};

use thiserror::Error;

use crate::problems::{Problem, Solution};
use crate::util::euclidean;

/// Largest grid the spatial/frequency memories will enumerate.
const MAX_GRID_CELLS: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum MemoryError {
    #[error("deep capacity N_d = {deep} must exceed shallow capacity N_s = {shallow}")]
    DeepNotLargerThanShallow { deep: usize, shallow: usize },
    #[error("{field} must be positive")]
    NonPositive { field: &'static str },
    #[error("grid of {cells} cells exceeds the {MAX_GRID_CELLS} cell limit; lower partitions_per_dim or grid_dimension_cap")]
    GridTooLarge { cells: u64 },
    #[error("tick({iteration}) called twice within one iteration")]
    DoubleTick { iteration: u64 },
    #[error("tick({iteration}) would move backwards from iteration {last}")]
    TickBackwards { iteration: u64, last: u64 },
}

/// Capacities, temporal depths, and partition geometry of a memory bank.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryConfig {
    /// N_d: entries retained by each deep memory.
    pub deep_capacity: usize,
    /// N_s: entries exposed by each shallow memory.
    pub shallow_capacity: usize,
    /// N_x: entries exposed by each extended-shallow memory.
    pub extended_capacity: usize,
    /// d_e: elite shallow depth, in iterations.
    pub elite_depth: u64,
    /// d_f: frequency shallow window, in iterations.
    pub frequency_depth: u64,
    /// d_c: characteristic shallow depth, in iterations.
    pub characteristic_depth: u64,
    /// d_s: spatial shallow window, in iterations.
    pub spatial_depth: u64,
    /// d_r: number of positions the tabu ring retains.
    pub recentness_capacity: usize,
    /// Epsilon ball radius for tabu membership in continuous space.
    pub tabu_radius: f64,
    /// k: grid bins per gridded dimension.
    pub partitions_per_dim: usize,
    /// Dimensions beyond this many are not gridded, bounding the cell count.
    pub grid_dimension_cap: usize,
}

impl MemoryConfig {
    /// Defaults scaled to a problem: the tabu radius is a small fraction of
    /// the domain diagonal, everything else is problem-independent.
    pub fn for_problem(problem: &Problem) -> Self {
        Self {
            deep_capacity: 50,
            shallow_capacity: 10,
            extended_capacity: 10,
            elite_depth: 50,
            frequency_depth: 50,
            characteristic_depth: 50,
            spatial_depth: 50,
            recentness_capacity: 50,
            tabu_radius: 1e-3 * problem.diagonal(),
            partitions_per_dim: 2,
            grid_dimension_cap: 8,
        }
    }

    /// Grid cells this configuration produces on an n-dimensional problem.
    pub fn cell_count(&self, dimension: usize) -> u64 {
        let gridded = dimension.min(self.grid_dimension_cap).max(1) as u32;
        (self.partitions_per_dim as u64)
            .checked_pow(gridded)
            .unwrap_or(u64::MAX)
    }

    pub fn validate(&self, dimension: usize) -> Result<(), MemoryError> {
        if self.deep_capacity <= self.shallow_capacity {
            return Err(MemoryError::DeepNotLargerThanShallow {
                deep: self.deep_capacity,
                shallow: self.shallow_capacity,
            });
        }
        for (value, field) in [
            (self.deep_capacity, "deep capacity N_d"),
            (self.shallow_capacity, "shallow capacity N_s"),
            (self.extended_capacity, "extended capacity N_x"),
            (self.recentness_capacity, "recentness capacity d_r"),
            (self.partitions_per_dim, "partitions_per_dim"),
            (self.grid_dimension_cap, "grid_dimension_cap"),
        ] {
            if value == 0 {
                return Err(MemoryError::NonPositive { field });
            }
        }
        for (value, field) in [
            (self.elite_depth, "elite depth d_e"),
            (self.frequency_depth, "frequency depth d_f"),
            (self.characteristic_depth, "characteristic depth d_c"),
            (self.spatial_depth, "spatial depth d_s"),
        ] {
            if value == 0 {
                return Err(MemoryError::NonPositive { field });
            }
        }
        if self.tabu_radius.is_nan() || self.tabu_radius <= 0.0 {
            return Err(MemoryError::NonPositive {
                field: "tabu_radius",
            });
        }
        let gridded = dimension.min(self.grid_dimension_cap).max(1) as u32;
        let cells = (self.partitions_per_dim as u64)
            .checked_pow(gridded)
            .unwrap_or(u64::MAX);
        if cells > MAX_GRID_CELLS {
            return Err(MemoryError::GridTooLarge { cells });
        }
        Ok(())
    }
}

/// Pluggable score for the characteristic memory; higher is better.
pub trait Feature: Send + Sync {
    fn score(&self, solution: &Solution, incumbent_best: Option<&Solution>) -> f64;
    fn name(&self) -> &'static str;
}

/// Default characteristic feature: negated Euclidean distance to the
/// incumbent deep-elite best, rewarding proximity to the incumbent basin.
pub struct ProximityToIncumbent;

impl Feature for ProximityToIncumbent {
    fn score(&self, solution: &Solution, incumbent_best: Option<&Solution>) -> f64 {
        match incumbent_best {
            Some(best) => -euclidean(&solution.position, &best.position),
            None => 0.0,
        }
    }

    fn name(&self) -> &'static str {
        "proximity_to_incumbent"
    }
}

/// Elite memory: solutions ranked by objective value.
#[derive(Debug, Clone)]
pub struct EliteMemory {
    store: LayeredStore,
}

impl EliteMemory {
    fn new(config: &MemoryConfig) -> Self {
        Self {
            store: LayeredStore::new(
                config.deep_capacity,
                config.shallow_capacity,
                config.extended_capacity,
                config.elite_depth,
            ),
        }
    }

    pub fn deep(&self) -> &[RankedEntry] {
        self.store.deep()
    }

    pub fn shallow(&self) -> &[TimedEntry] {
        self.store.shallow()
    }

    pub fn extended(&self) -> &[TimedEntry] {
        self.store.extended()
    }

    pub fn best(&self) -> Option<&Solution> {
        self.store.best()
    }

    pub fn best_value(&self) -> Option<f64> {
        self.store.best_key()
    }
}

/// Characteristic memory: solutions ranked by a pluggable feature score.
pub struct CharacteristicMemory {
    feature: Box<dyn Feature>,
    store: LayeredStore,
}

impl CharacteristicMemory {
    fn new(config: &MemoryConfig, feature: Box<dyn Feature>) -> Self {
        Self {
            feature,
            store: LayeredStore::new(
                config.deep_capacity,
                config.shallow_capacity,
                config.extended_capacity,
                config.characteristic_depth,
            ),
        }
    }

    pub fn deep(&self) -> &[RankedEntry] {
        self.store.deep()
    }

    pub fn shallow(&self) -> &[TimedEntry] {
        self.store.shallow()
    }

    pub fn extended(&self) -> &[TimedEntry] {
        self.store.extended()
    }

    /// Feature score of a deep entry (stored keys are negated scores).
    pub fn deep_scores(&self) -> impl Iterator<Item = (&Solution, f64)> {
        self.store.deep().iter().map(|e| (&e.solution, -e.key))
    }

    pub fn feature_name(&self) -> &'static str {
        self.feature.name()
    }
}

/// Serializable summary of a bank: deep elite contents, the visit-frequency
/// histogram, and grid coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct MemorySnapshot {
    pub deep_elite: Vec<(Vec<f64>, f64)>,
    pub frequency_histogram: Vec<(u64, u64)>,
    pub cells_total: u64,
    pub cells_visited: u64,
    pub coverage: f64,
    pub total_visits: u64,
}

/// The five memories of one run, advanced together.
pub struct MemoryBank {
    config: MemoryConfig,
    grid: Grid,
    pub elite: EliteMemory,
    pub frequency: FrequencyMemory,
    pub characteristic: CharacteristicMemory,
    pub spatial: SpatialMemory,
    pub recentness: RecentnessMemory,
    last_tick: Option<u64>,
}

impl MemoryBank {
    pub fn new(problem: &Problem, config: MemoryConfig) -> Result<Self, MemoryError> {
        Self::with_feature(problem, config, Box::new(ProximityToIncumbent))
    }

    pub fn with_feature(
        problem: &Problem,
        config: MemoryConfig,
        feature: Box<dyn Feature>,
    ) -> Result<Self, MemoryError> {
        config.validate(problem.dimension())?;
        let grid = Grid::new(problem, config.partitions_per_dim, config.grid_dimension_cap);
        Ok(Self {
            elite: EliteMemory::new(&config),
            frequency: FrequencyMemory::new(config.frequency_depth),
            characteristic: CharacteristicMemory::new(&config, feature),
            spatial: SpatialMemory::new(grid.cell_count(), config.spatial_depth),
            recentness: RecentnessMemory::new(config.recentness_capacity),
            grid,
            config,
            last_tick: None,
        })
    }

    pub fn config(&self) -> &MemoryConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Records an evaluated solution into all five memories.
    pub fn record_visit(&mut self, solution: &Solution, iteration: u64) {
        self.elite.store.record(solution, solution.value);
        // feature scoring sees the elite best including this visit
        let score = self
            .characteristic
            .feature
            .score(solution, self.elite.best());
        self.characteristic.store.record(solution, -score);
        let cell = self.grid.cell_of(&solution.position);
        self.frequency.record(cell);
        self.spatial.record(cell, &solution.position, iteration);
        self.recentness.push(&solution.position);
    }

    /// Advances every shallow depth index by one iteration. Must be called
    /// exactly once per engine iteration.
    pub fn tick(&mut self, iteration: u64) -> Result<(), MemoryError> {
        match self.last_tick {
            Some(last) if last == iteration => {
                return Err(MemoryError::DoubleTick { iteration });
            }
            Some(last) if last > iteration => {
                return Err(MemoryError::TickBackwards { iteration, last });
            }
            _ => {}
        }
        self.last_tick = Some(iteration);
        self.elite.store.tick();
        self.characteristic.store.tick();
        self.frequency.tick();
        Ok(())
    }

    /// Drops every shallow layer; deep layers and the tabu ring persist.
    /// Called at search-stage transitions.
    pub fn clear_shallow(&mut self, iteration: u64) {
        self.elite.store.clear_shallow();
        self.characteristic.store.clear_shallow();
        self.frequency.clear_shallow();
        self.spatial.clear_shallow(iteration);
    }

    pub fn is_tabu(&self, position: &[f64], radius: f64) -> bool {
        self.recentness.is_tabu(position, radius)
    }

    pub fn least_visited_cells(&self, count: usize) -> Vec<u64> {
        self.spatial.least_visited(count)
    }

    pub fn coverage(&self) -> f64 {
        self.spatial.coverage()
    }

    pub fn snapshot(&self) -> MemorySnapshot {
        MemorySnapshot {
            deep_elite: self
                .elite
                .deep()
                .iter()
                .map(|e| (e.solution.position.clone(), e.solution.value))
                .collect(),
            frequency_histogram: self
                .frequency
                .deep_counts()
                .iter()
                .map(|(&cell, &count)| (cell, count))
                .collect(),
            cells_total: self.spatial.cell_count(),
            cells_visited: self.spatial.visited_cells(),
            coverage: self.spatial.coverage(),
            total_visits: self.frequency.total_visits(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::benchmark;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_config() -> MemoryConfig {
        MemoryConfig {
            deep_capacity: 10,
            shallow_capacity: 3,
            extended_capacity: 3,
            elite_depth: 4,
            frequency_depth: 3,
            characteristic_depth: 4,
            spatial_depth: 4,
            recentness_capacity: 5,
            tabu_radius: 0.1,
            partitions_per_dim: 2,
            grid_dimension_cap: 8,
        }
    }

    fn sol(position: Vec<f64>, value: f64) -> Solution {
        Solution {
            position,
            value,
            birth_iteration: 0,
        }
    }

    #[test]
    fn first_insertion_populates_all_memories() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        let s = sol(vec![1.0, 1.0], 3.0);
        bank.record_visit(&s, 0);
        assert_eq!(bank.elite.deep().len(), 1);
        assert_eq!(bank.elite.deep()[0].solution.value, 3.0);
        let cell = bank.grid().cell_of(&[1.0, 1.0]);
        assert_eq!(bank.frequency.deep_count(cell), 1);
        assert_eq!(bank.spatial.visit_count(cell), 1);
        assert!(bank.is_tabu(&[1.0, 1.0], 1e-9));
        assert_eq!(bank.characteristic.deep().len(), 1);
    }

    #[test]
    fn full_deep_elite_evicts_worst() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        // ten entries with values 0..=9, then an 8.5 displaces the 9
        for v in 0..10 {
            bank.record_visit(&sol(vec![v as f64 * 0.1, 0.0], v as f64), 0);
        }
        bank.record_visit(&sol(vec![-1.0, -1.0], 8.5), 0);
        let values: Vec<f64> = bank.elite.deep().iter().map(|e| e.key).collect();
        let expected: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 8.5];
        assert_eq!(values, expected);
    }

    #[test]
    fn duplicate_position_refreshes_depth_without_growth() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        bank.record_visit(&sol(vec![0.5, 0.5], 1.0), 0);
        bank.tick(0).unwrap();
        assert_eq!(bank.elite.shallow()[0].depth, 1);
        bank.record_visit(&sol(vec![0.5, 0.5], 1.0), 1);
        assert_eq!(bank.elite.shallow().len(), 1);
        assert_eq!(bank.elite.shallow()[0].depth, 0);
    }

    #[test]
    fn shallow_eviction_promotes_from_extended() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut config = small_config();
        config.shallow_capacity = 1;
        config.extended_capacity = 1;
        config.elite_depth = 2;
        let mut bank = MemoryBank::new(&problem, config).unwrap();
        bank.record_visit(&sol(vec![0.1, 0.0], 1.0), 0);
        bank.tick(0).unwrap();
        bank.tick(1).unwrap();
        bank.record_visit(&sol(vec![0.2, 0.0], 2.0), 2);
        assert_eq!(bank.elite.shallow()[0].key, 1.0);
        assert_eq!(bank.elite.extended()[0].key, 2.0);
        // depth of the first entry passes the bound; the extended one moves up
        bank.tick(2).unwrap();
        assert_eq!(bank.elite.shallow()[0].key, 2.0);
        assert!(bank.elite.extended().is_empty());
    }

    #[test]
    fn double_tick_is_a_contract_violation() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        bank.tick(3).unwrap();
        assert!(matches!(
            bank.tick(3),
            Err(MemoryError::DoubleTick { iteration: 3 })
        ));
        assert!(matches!(
            bank.tick(1),
            Err(MemoryError::TickBackwards { .. })
        ));
        bank.tick(4).unwrap();
    }

    #[test]
    fn config_requires_deep_larger_than_shallow() {
        let mut config = small_config();
        config.deep_capacity = 3;
        config.shallow_capacity = 3;
        assert!(matches!(
            config.validate(2),
            Err(MemoryError::DeepNotLargerThanShallow { .. })
        ));
    }

    #[test]
    fn config_rejects_oversized_grids() {
        let mut config = small_config();
        config.partitions_per_dim = 100;
        config.grid_dimension_cap = 12;
        assert!(matches!(
            config.validate(12),
            Err(MemoryError::GridTooLarge { .. })
        ));
    }

    #[test]
    fn snapshot_reports_coverage() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        let fresh = bank.snapshot();
        assert_eq!(fresh.coverage, 0.0);
        assert!(fresh.deep_elite.is_empty());

        bank.record_visit(&sol(vec![1.0, 1.0], 2.0), 0);
        let after = bank.snapshot();
        assert_eq!(after.cells_total, 4);
        assert_eq!(after.coverage, 0.25);
        assert_eq!(after.total_visits, 1);
    }

    #[test]
    fn snapshot_replay_is_deterministic() {
        let problem = benchmark("sphere", 3).unwrap();
        let replay = |seed: u64| {
            let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for iteration in 0..20u64 {
                for _ in 0..5 {
                    let position: Vec<f64> =
                        (0..3).map(|_| rng.random_range(-5.12..5.12)).collect();
                    let value = problem.objective_value(&position);
                    bank.record_visit(
                        &Solution {
                            position,
                            value,
                            birth_iteration: iteration,
                        },
                        iteration,
                    );
                }
                bank.tick(iteration).unwrap();
            }
            bank.snapshot()
        };
        assert_eq!(replay(11), replay(11));
        assert_ne!(replay(11), replay(12));
    }

    /// Oracle: deep elite equals the brute-force best-by-value of the full
    /// visit log (positions deduplicated, earliest visit wins ties).
    #[test]
    fn deep_elite_matches_brute_force_log() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut log: Vec<Solution> = Vec::new();
        for iteration in 0..40u64 {
            for _ in 0..8 {
                let position: Vec<f64> = if rng.random_bool(0.1) && !log.is_empty() {
                    log[rng.random_range(0..log.len())].position.clone()
                } else {
                    (0..2).map(|_| rng.random_range(-5.12..5.12)).collect()
                };
                let value = problem.objective_value(&position);
                let s = Solution {
                    position,
                    value,
                    birth_iteration: iteration,
                };
                bank.record_visit(&s, iteration);
                log.push(s);
            }
            bank.tick(iteration).unwrap();
        }

        let mut dedup: Vec<&Solution> = Vec::new();
        for s in &log {
            if !dedup.iter().any(|d| d.position == s.position) {
                dedup.push(s);
            }
        }
        dedup.sort_by(|a, b| a.value.total_cmp(&b.value));
        let expected: Vec<(Vec<f64>, f64)> = dedup
            .iter()
            .take(10)
            .map(|s| (s.position.clone(), s.value))
            .collect();
        let actual: Vec<(Vec<f64>, f64)> = bank
            .elite
            .deep()
            .iter()
            .map(|e| (e.solution.position.clone(), e.solution.value))
            .collect();
        assert_eq!(actual, expected);
    }

    #[test]
    fn frequency_conservation() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut visits = 0u64;
        for iteration in 0..30u64 {
            for _ in 0..4 {
                let position: Vec<f64> = (0..2).map(|_| rng.random_range(-5.12..5.12)).collect();
                let value = problem.objective_value(&position);
                bank.record_visit(
                    &Solution {
                        position,
                        value,
                        birth_iteration: iteration,
                    },
                    iteration,
                );
                visits += 1;
            }
            bank.tick(iteration).unwrap();
        }
        assert_eq!(bank.frequency.total_visits(), visits);
        assert_eq!(
            bank.frequency.deep_counts().values().sum::<u64>(),
            visits
        );
    }

    #[test]
    fn clear_shallow_preserves_deep_layers() {
        let problem = benchmark("sphere", 2).unwrap();
        let mut bank = MemoryBank::new(&problem, small_config()).unwrap();
        for v in 0..6 {
            bank.record_visit(&sol(vec![v as f64 * 0.3 - 1.0, 0.0], v as f64), 0);
        }
        bank.tick(0).unwrap();
        let deep_before = bank.elite.deep().len();
        bank.clear_shallow(1);
        assert_eq!(bank.elite.deep().len(), deep_before);
        assert!(bank.elite.shallow().is_empty());
        assert_eq!(bank.frequency.shallow_count(0), 0);
        assert!(bank.frequency.total_visits() > 0);
    }
}
