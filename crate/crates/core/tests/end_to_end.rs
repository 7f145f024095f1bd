//! Public-API integration: custom problems, a pluggable characteristic
//! feature, and a hand-rolled driver loop built from the exported pieces.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dhs_core::drivers::{ts_step, DriverConfig, DriverKind, SearchContext};
use dhs_core::memory::{Feature, MemoryBank, MemoryConfig};
use dhs_core::operators::{OperationMode, OperatorBaselines};
use dhs_core::problems::{evaluate, EvalCounter, Problem, Solution};
use dhs_core::report::{RunTrace, StageTag};
use dhs_core::{run, run_plain, StagePlan};

fn shifted_quadratic() -> Problem {
    Problem::new(
        "shifted_quadratic",
        vec![-4.0; 3],
        vec![4.0; 3],
        Arc::new(|x: &[f64]| {
            x.iter()
                .zip([1.0, -2.0, 0.5])
                .map(|(v, c)| (v - c) * (v - c))
                .sum()
        }),
        Some(0.0),
    )
    .unwrap()
}

#[test]
fn staged_run_works_on_a_user_defined_problem() {
    let problem = shifted_quadratic();
    let memory = MemoryConfig::for_problem(&problem);
    let mut plan = StagePlan::for_budget(8000, memory.cell_count(3));
    plan.gentry_size = 40;
    let config = DriverConfig::for_kind(DriverKind::Es);
    let baselines = OperatorBaselines::for_problem(&problem);

    let report = run(&plan, &problem, &config, &memory, &baselines, 7).unwrap();
    assert!(report.best.value < 1e-3, "best {}", report.best.value);
    let expected = [1.0, -2.0, 0.5];
    for (i, &coordinate) in report.best.position.iter().enumerate() {
        assert!((coordinate - expected[i]).abs() < 0.1);
    }
    // re-running reproduces the report exactly
    let again = run(&plan, &problem, &config, &memory, &baselines, 7).unwrap();
    assert_eq!(report, again);
}

#[test]
fn plain_and_staged_share_the_reporting_surface() {
    let problem = shifted_quadratic();
    let memory = MemoryConfig::for_problem(&problem);
    let config = DriverConfig::for_kind(DriverKind::Ga);
    let baselines = OperatorBaselines::for_problem(&problem);
    let report = run_plain(&problem, &config, &memory, &baselines, 1500, 3).unwrap();
    assert!(report.trace.iter().all(|r| r.stage == StageTag::Plain));
    assert_eq!(report.snapshot.total_visits, report.total_evaluations);
    assert!(report.evaluations_to_threshold(1e9).is_some());
}

struct SecondCoordinate;

impl Feature for SecondCoordinate {
    fn score(&self, solution: &Solution, _incumbent: Option<&Solution>) -> f64 {
        // favor large second coordinates regardless of objective value
        solution.position[1]
    }

    fn name(&self) -> &'static str {
        "second_coordinate"
    }
}

#[test]
fn characteristic_memory_accepts_a_custom_feature() {
    let problem = shifted_quadratic();
    let mut bank = MemoryBank::with_feature(
        &problem,
        MemoryConfig::for_problem(&problem),
        Box::new(SecondCoordinate),
    )
    .unwrap();
    assert_eq!(bank.characteristic.feature_name(), "second_coordinate");

    for (i, y) in [-3.0, 2.0, 3.5, 0.0].iter().enumerate() {
        let position = vec![0.0, *y, 0.0];
        let value = problem.objective_value(&position);
        bank.record_visit(
            &Solution {
                position,
                value,
                birth_iteration: i as u64,
            },
            0,
        );
    }
    let ranked: Vec<f64> = bank
        .characteristic
        .deep_scores()
        .map(|(_, score)| score)
        .collect();
    assert_eq!(ranked, vec![3.5, 2.0, 0.0, -3.0]);
}

#[test]
fn the_exported_pieces_compose_into_a_custom_loop() {
    let problem = shifted_quadratic();
    let mut bank = MemoryBank::new(&problem, MemoryConfig::for_problem(&problem)).unwrap();
    let baselines = OperatorBaselines::for_problem(&problem);
    let mut counter = EvalCounter::new();
    let mut trace = RunTrace::new(StageTag::Plain);
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let mut current = evaluate(&problem, &mut counter, vec![0.0; 3], 0).unwrap();
    bank.record_visit(&current, 0);
    trace.observe(counter.used(), &current);

    for iteration in 1..=50u64 {
        let mut ctx = SearchContext {
            problem: &problem,
            bank: &mut bank,
            counter: &mut counter,
            trace: &mut trace,
            rng: &mut rng,
            iteration,
        };
        ts_step(&mut current, OperationMode::Normal, &baselines, &mut ctx);
        bank.tick(iteration).unwrap();
    }

    assert_eq!(
        counter.used(),
        1 + 50 * (baselines.zone_count * baselines.trials_per_zone) as u64
    );
    assert!(trace.best_value().unwrap() <= current.value);
    assert!(bank.coverage() > 0.0);
}
