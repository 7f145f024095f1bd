//! The integrated strategic search: five stages run in order — initial,
//! exploratory, mixed, intensive, final — wiring stage-appropriate operation
//! modes, restarts, and memory-driven termination around one driver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::drivers::{ts_step, Driver, DriverConfig, DriverKind, SearchContext, Selection};
use crate::memory::{MemoryBank, MemoryConfig, MemoryError};
use crate::operators::{
    mode_params, sample_unit_direction, NeighborhoodParams, OperationMode, OperatorBaselines,
};
use crate::problems::{EvalCounter, Problem, Solution};
use crate::report::{
    BurstEvent, BurstKind, ModeEvent, RestartCounts, RunReport, RunTrace, StageTag, WrapperKind,
};
use crate::util::euclidean;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("stage budgets sum to {actual}, expected the total budget {expected}")]
    BudgetMismatch { expected: u64, actual: u64 },
    #[error("{stage} stage budget must be positive")]
    EmptyStageBudget { stage: &'static str },
    #[error("gentry size {gentry} exceeds the initial-search budget {budget}")]
    GentryExceedsInitialBudget { gentry: u64, budget: u64 },
    #[error("gentry size {gentry} cannot seed a driver needing {needed} solutions")]
    GentryBelowPopulation { gentry: usize, needed: usize },
    #[error("gentry size G must be positive")]
    EmptyGentry,
    #[error("coverage target {0} must lie in (0, 1]")]
    CoverageOutOfRange(f64),
    #[error("agreement fraction {0} must lie in (0, 1]")]
    AgreementOutOfRange(f64),
    #[error("similarity tolerance {0} must be positive")]
    NonPositiveTolerance(f64),
    #[error("intensive candidate count K must be positive")]
    NoCandidates,
    #[error("burst length I_b must be positive")]
    EmptyBurst,
    #[error("genetic algorithm needs a population of at least 2, got {0}")]
    GaNeedsPair(usize),
    #[error("comma selection requires lambda >= mu, got mu = {mu}, lambda = {lambda}")]
    CommaNeedsLambda { mu: usize, lambda: usize },
    #[error(transparent)]
    Memory(#[from] MemoryError),
}

/// Ordered configuration of the five search stages.
#[derive(Debug, Clone, PartialEq)]
pub struct StagePlan {
    pub budget_initial: u64,
    pub budget_exploratory: u64,
    pub budget_mixed: u64,
    pub budget_intensive: u64,
    pub budget_final: u64,
    /// T_e: exploratory iterations without deep-elite improvement before a
    /// restart.
    pub stagnation_exploratory: u64,
    /// T_m: mixed-stage stagnation window.
    pub stagnation_mixed: u64,
    /// R_e, R_m, R_i: restart limits per stage.
    pub restart_limit_exploratory: u32,
    pub restart_limit_mixed: u32,
    pub restart_limit_intensive: u32,
    /// c*: grid-coverage fraction that ends exploration.
    pub coverage_target: f64,
    /// G: size of the stratified initial solution set.
    pub gentry_size: usize,
    /// K: candidates refined by the intensive stage and analyzed by the
    /// final stage.
    pub intensive_candidates: usize,
    /// delta: per-coordinate agreement tolerance, scaled by domain width.
    pub similarity_tolerance: f64,
    /// a*: fraction of elites that must agree to freeze a coordinate.
    pub agreement_fraction: f64,
    /// I_b: iterations per intensification burst.
    pub burst_iterations: u64,
}

impl StagePlan {
    /// Default plan: budgets split 5/20/45/20/10 percent (remainder to the
    /// mixed stage), gentry sized to the grid.
    pub fn for_budget(total: u64, cell_count: u64) -> Self {
        let budget_initial = total * 5 / 100;
        let budget_exploratory = total * 20 / 100;
        let budget_intensive = total * 20 / 100;
        let budget_final = total * 10 / 100;
        let budget_mixed =
            total - budget_initial - budget_exploratory - budget_intensive - budget_final;
        Self {
            budget_initial,
            budget_exploratory,
            budget_mixed,
            budget_intensive,
            budget_final,
            stagnation_exploratory: 20,
            stagnation_mixed: 50,
            restart_limit_exploratory: 3,
            restart_limit_mixed: 5,
            restart_limit_intensive: 5,
            coverage_target: 0.6,
            gentry_size: cell_count.saturating_mul(10).clamp(1, 1000) as usize,
            intensive_candidates: 5,
            similarity_tolerance: 0.01,
            agreement_fraction: 0.8,
            burst_iterations: 10,
        }
    }

    pub fn total_budget(&self) -> u64 {
        self.budget_initial
            + self.budget_exploratory
            + self.budget_mixed
            + self.budget_intensive
            + self.budget_final
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        for (budget, stage) in [
            (self.budget_initial, "initial"),
            (self.budget_exploratory, "exploratory"),
            (self.budget_mixed, "mixed"),
            (self.budget_intensive, "intensive"),
            (self.budget_final, "final"),
        ] {
            if budget == 0 {
                return Err(PlanError::EmptyStageBudget { stage });
            }
        }
        if self.gentry_size == 0 {
            return Err(PlanError::EmptyGentry);
        }
        if self.gentry_size as u64 > self.budget_initial {
            return Err(PlanError::GentryExceedsInitialBudget {
                gentry: self.gentry_size as u64,
                budget: self.budget_initial,
            });
        }
        if !(self.coverage_target > 0.0 && self.coverage_target <= 1.0) {
            return Err(PlanError::CoverageOutOfRange(self.coverage_target));
        }
        if !(self.agreement_fraction > 0.0 && self.agreement_fraction <= 1.0) {
            return Err(PlanError::AgreementOutOfRange(self.agreement_fraction));
        }
        if self.similarity_tolerance.is_nan() || self.similarity_tolerance <= 0.0 {
            return Err(PlanError::NonPositiveTolerance(self.similarity_tolerance));
        }
        if self.intensive_candidates == 0 {
            return Err(PlanError::NoCandidates);
        }
        if self.burst_iterations == 0 {
            return Err(PlanError::EmptyBurst);
        }
        Ok(())
    }

    /// Checks the plan against an externally specified total budget.
    pub fn validate_total(&self, expected: u64) -> Result<(), PlanError> {
        let actual = self.total_budget();
        if actual != expected {
            return Err(PlanError::BudgetMismatch { expected, actual });
        }
        Ok(())
    }
}

/// Per-coordinate consensus analysis of the final stage. For each coordinate
/// the largest group of elites agreeing within `tolerance * width` is found
/// (over sorted values, earliest window on ties); when the group reaches the
/// agreement fraction the coordinate freezes at the group's mean.
pub fn similarity_freeze(
    elites: &[Vec<f64>],
    widths: &[f64],
    tolerance: f64,
    agreement_fraction: f64,
) -> Vec<Option<f64>> {
    assert!(!elites.is_empty(), "similarity analysis needs elites");
    let k = elites.len();
    (0..widths.len())
        .map(|j| {
            let mut values: Vec<f64> = elites.iter().map(|e| e[j]).collect();
            values.sort_by(f64::total_cmp);
            let tol = tolerance * widths[j];
            let mut best_start = 0;
            let mut best_len = 0;
            let mut start = 0;
            for end in 0..k {
                while values[end] - values[start] > tol {
                    start += 1;
                }
                if end - start + 1 > best_len {
                    best_len = end - start + 1;
                    best_start = start;
                }
            }
            if best_len as f64 / k as f64 >= agreement_fraction {
                let group = &values[best_start..best_start + best_len];
                Some(group.iter().sum::<f64>() / group.len() as f64)
            } else {
                None
            }
        })
        .collect()
}

/// One staged run in progress. Stages may be driven individually; [`run`]
/// executes the whole pipeline.
pub struct DhsRun {
    plan: StagePlan,
    problem: Problem,
    driver_config: DriverConfig,
    baselines: OperatorBaselines,
    bank: MemoryBank,
    counter: EvalCounter,
    trace: RunTrace,
    rng: ChaCha8Rng,
    driver: Option<Driver>,
    iteration: u64,
    restarts: RestartCounts,
    mode_log: Vec<ModeEvent>,
    bursts: Vec<BurstEvent>,
    stage_boundaries: Vec<(StageTag, u64)>,
    seed: u64,
}

impl DhsRun {
    pub fn new(
        plan: StagePlan,
        problem: &Problem,
        driver_config: DriverConfig,
        memory_config: MemoryConfig,
        baselines: OperatorBaselines,
        seed: u64,
    ) -> Result<Self, PlanError> {
        plan.validate()?;
        match driver_config.kind {
            DriverKind::Ga if driver_config.mu < 2 => {
                return Err(PlanError::GaNeedsPair(driver_config.mu));
            }
            DriverKind::Es
                if driver_config.selection == Selection::Comma
                    && driver_config.lambda < driver_config.mu =>
            {
                return Err(PlanError::CommaNeedsLambda {
                    mu: driver_config.mu,
                    lambda: driver_config.lambda,
                });
            }
            _ => {}
        }
        if plan.gentry_size < driver_config.seed_count() {
            return Err(PlanError::GentryBelowPopulation {
                gentry: plan.gentry_size,
                needed: driver_config.seed_count(),
            });
        }
        let bank = MemoryBank::new(problem, memory_config)?;
        Ok(Self {
            plan,
            problem: problem.clone(),
            driver_config,
            baselines,
            bank,
            counter: EvalCounter::new(),
            trace: RunTrace::new(StageTag::Initial),
            rng: ChaCha8Rng::seed_from_u64(seed),
            driver: None,
            iteration: 0,
            restarts: RestartCounts::default(),
            mode_log: Vec::new(),
            bursts: Vec::new(),
            stage_boundaries: Vec::new(),
            seed,
        })
    }

    pub fn bank(&self) -> &MemoryBank {
        &self.bank
    }

    pub fn bank_mut(&mut self) -> &mut MemoryBank {
        &mut self.bank
    }

    pub fn evaluations(&self) -> u64 {
        self.counter.used()
    }

    pub fn best(&self) -> Option<&Solution> {
        self.trace.best()
    }

    pub fn mode_log(&self) -> &[ModeEvent] {
        &self.mode_log
    }

    pub fn restarts(&self) -> RestartCounts {
        self.restarts
    }

    fn ctx(&mut self) -> SearchContext<'_> {
        SearchContext {
            problem: &self.problem,
            bank: &mut self.bank,
            counter: &mut self.counter,
            trace: &mut self.trace,
            rng: &mut self.rng,
            iteration: self.iteration,
        }
    }

    fn enter_stage(&mut self, stage: StageTag) {
        // shallow memories persist within a stage only
        if !self.stage_boundaries.is_empty() {
            self.bank.clear_shallow(self.iteration);
        }
        self.trace.enter_stage(stage, self.counter.used());
        self.stage_boundaries.push((stage, self.counter.used()));
    }

    fn log_mode(&mut self, mode: OperationMode, burst: Option<BurstKind>) {
        self.mode_log.push(ModeEvent {
            stage: self.trace.stage(),
            mode,
            burst,
        });
    }

    fn advance_iteration(&mut self) {
        self.bank
            .tick(self.iteration)
            .expect("one tick per engine iteration");
        self.iteration += 1;
    }

    /// Uniform point inside a grid cell (dimensions beyond the gridded
    /// prefix are sampled over their full range).
    fn sample_cell_point(&mut self, cell: u64) -> Vec<f64> {
        let bounds = self.bank.grid().cell_bounds(cell);
        (0..self.problem.dimension())
            .map(|i| {
                let (lo, hi) = bounds.get(i).copied().unwrap_or((
                    self.problem.lower_bounds()[i],
                    self.problem.upper_bounds()[i],
                ));
                self.rng.random_range(lo..hi)
            })
            .collect()
    }

    /// Evaluates `count` fresh solutions drawn round-robin from the least
    /// visited cells.
    fn sample_least_visited(&mut self, count: usize) -> Vec<Solution> {
        let cells = self.bank.least_visited_cells(count);
        let mut fresh = Vec::with_capacity(count);
        for j in 0..count {
            let point = self.sample_cell_point(cells[j % cells.len()]);
            let solution = self.ctx().evaluate_and_record(point);
            fresh.push(solution);
        }
        fresh
    }

    /// Initial search: builds the grid coverage by generating the gentry —
    /// one uniform point per least-visited cell, round-robin — and selects
    /// the best solutions as the driver's starting state.
    pub fn initial_search(&mut self) {
        self.enter_stage(StageTag::Initial);
        let order = self
            .bank
            .least_visited_cells(self.bank.grid().cell_count() as usize);
        let mut gentry = Vec::with_capacity(self.plan.gentry_size);
        for j in 0..self.plan.gentry_size {
            let point = self.sample_cell_point(order[j % order.len()]);
            let solution = self.ctx().evaluate_and_record(point);
            gentry.push(solution);
        }
        self.driver = Some(Driver::new(
            self.driver_config.clone(),
            gentry,
            &self.problem,
        ));
        self.advance_iteration();
    }

    /// Exploratory search: expand-mode driver steps until the stage budget
    /// is consumed or grid coverage reaches the target; stagnation restarts
    /// reseed the driver from least-visited cells with the expand multiplier
    /// grown by 1.5x.
    pub fn exploratory_search(&mut self) {
        self.enter_stage(StageTag::Exploratory);
        let stage_end = self.counter.used() + self.plan.budget_exploratory;
        let mut baselines = self.baselines.clone();
        let mut stagnation = 0u64;
        while self.counter.used() < stage_end {
            let before = self.bank.elite.best_value();
            self.log_mode(OperationMode::Expand, None);
            let mut driver = self.driver.take().expect("initial stage ran");
            {
                let mut ctx = self.ctx();
                driver.step(OperationMode::Expand, &baselines, &mut ctx);
            }
            self.driver = Some(driver);
            self.advance_iteration();

            if self.bank.coverage() >= self.plan.coverage_target {
                break;
            }
            if improved(before, self.bank.elite.best_value()) {
                stagnation = 0;
            } else {
                stagnation += 1;
            }
            if stagnation >= self.plan.stagnation_exploratory
                && self.restarts.exploratory < self.plan.restart_limit_exploratory
                && self.counter.used() < stage_end
            {
                baselines.expand_multiplier *= 1.5;
                let fresh = self.sample_least_visited(self.driver_config.seed_count());
                let mut driver = self.driver.take().expect("driver present");
                driver.reinit(fresh, &self.problem);
                self.driver = Some(driver);
                self.restarts.exploratory += 1;
                stagnation = 0;
            }
        }
    }

    /// Mixed search: normal-mode driver steps; an improving deep-elite top
    /// spot triggers a condense-mode intensification burst, stagnation
    /// triggers an expand-mode diversification burst seeded from least
    /// visited cells (bounded by the restart limit); terminates at budget,
    /// or early when coverage is reached and stagnation persists a full
    /// window with no bursts left.
    pub fn mixed_search(&mut self) {
        self.enter_stage(StageTag::Mixed);
        let stage_end = self.counter.used() + self.plan.budget_mixed;
        let mut stagnation = 0u64;
        while self.counter.used() < stage_end {
            let before = self.bank.elite.best_value();
            self.log_mode(OperationMode::Normal, None);
            let baselines = self.baselines.clone();
            let mut driver = self.driver.take().expect("initial stage ran");
            {
                let mut ctx = self.ctx();
                driver.step(OperationMode::Normal, &baselines, &mut ctx);
            }
            self.driver = Some(driver);
            self.advance_iteration();

            if improved(before, self.bank.elite.best_value()) {
                stagnation = 0;
                let trigger = self
                    .bank
                    .elite
                    .best()
                    .expect("an improvement implies an elite")
                    .clone();
                self.intensify_burst(&trigger, stage_end);
            } else {
                stagnation += 1;
                if stagnation >= self.plan.stagnation_mixed {
                    if self.restarts.mixed < self.plan.restart_limit_mixed
                        && self.counter.used() < stage_end
                    {
                        self.diversify_burst();
                        self.restarts.mixed += 1;
                        stagnation = 0;
                    } else if self.bank.coverage() >= self.plan.coverage_target {
                        // the spatial and frequency memories say the space is
                        // known and nothing moves: terminate the stage
                        break;
                    }
                }
            }
        }
    }

    /// Condense-mode tabu walk for `burst_iterations` iterations, starting
    /// at the solution that entered the deep elite's top position. The
    /// driver's own state is left untouched; everything the burst evaluates
    /// is recorded.
    fn intensify_burst(&mut self, trigger: &Solution, stage_end: u64) {
        let start = trigger.clone();
        self.bursts.push(BurstEvent {
            kind: BurstKind::Intensify,
            evaluation: self.counter.used(),
            start_distance: euclidean(&start.position, &trigger.position),
        });
        let baselines = self.baselines.clone();
        let mut current = start;
        for _ in 0..self.plan.burst_iterations {
            if self.counter.used() >= stage_end {
                break;
            }
            self.log_mode(OperationMode::Condense, Some(BurstKind::Intensify));
            let outcome = {
                let mut ctx = self.ctx();
                ts_step(&mut current, OperationMode::Condense, &baselines, &mut ctx)
            };
            self.advance_iteration();
            if outcome.stalled {
                break;
            }
        }
    }

    /// One expand-mode iteration seeded from least-visited cells.
    fn diversify_burst(&mut self) {
        let count = self.driver_config.seed_count().div_ceil(2).max(1);
        let fresh = self.sample_least_visited(count);
        let reference = self
            .driver
            .as_ref()
            .expect("initial stage ran")
            .best()
            .position
            .clone();
        self.bursts.push(BurstEvent {
            kind: BurstKind::Diversify,
            evaluation: self.counter.used(),
            start_distance: euclidean(&fresh[0].position, &reference),
        });
        let baselines = self.baselines.clone();
        let mut driver = self.driver.take().expect("driver present");
        driver.inject(fresh, &self.problem);
        self.log_mode(OperationMode::Expand, Some(BurstKind::Diversify));
        {
            let mut ctx = self.ctx();
            driver.step(OperationMode::Expand, &baselines, &mut ctx);
        }
        self.driver = Some(driver);
        self.advance_iteration();
    }

    /// Intensive search: the top candidates from the deep elite and deep
    /// characteristic memories are each refined by a condense-mode zone
    /// search anchored at the candidate; a candidate improving in its first
    /// half-budget restarts once from the same point with the radius halved.
    pub fn intensive_search(&mut self) {
        self.enter_stage(StageTag::Intensive);
        let stage_end = self.counter.used() + self.plan.budget_intensive;
        let candidates = self.intensive_candidates();
        if candidates.is_empty() {
            return;
        }
        let per_candidate = (self.plan.budget_intensive / candidates.len() as u64).max(1);
        for candidate in candidates {
            if self.counter.used() >= stage_end {
                break;
            }
            let candidate_end = (self.counter.used() + per_candidate).min(stage_end);
            self.refine_candidate(&candidate, candidate_end);
        }
    }

    /// Union of deep elite and deep characteristic solutions, deduplicated
    /// by position, ordered by objective value, truncated to K.
    fn intensive_candidates(&self) -> Vec<Solution> {
        let mut pool: Vec<&Solution> = Vec::new();
        for entry in self
            .bank
            .elite
            .deep()
            .iter()
            .chain(self.bank.characteristic.deep().iter())
        {
            if !pool.iter().any(|s| s.position == entry.solution.position) {
                pool.push(&entry.solution);
            }
        }
        pool.sort_by(|a, b| a.value.total_cmp(&b.value));
        pool.truncate(self.plan.intensive_candidates);
        pool.into_iter().cloned().collect()
    }

    fn refine_candidate(&mut self, seed: &Solution, end: u64) {
        let mut baselines = self.baselines.clone();
        let remaining = end.saturating_sub(self.counter.used());
        let half_end = self.counter.used() + remaining / 2;
        let mut best = seed.value;
        let improved_early = self.ball_walk(seed, half_end, &baselines, &mut best);
        if improved_early && self.restarts.intensive < self.plan.restart_limit_intensive {
            // restart from the same point with the radius halved
            self.restarts.intensive += 1;
            baselines.radius *= 0.5;
        }
        self.ball_walk(seed, end, &baselines, &mut best);
    }

    /// Condense-mode tabu walk confined to the zone span of `seed`: trials
    /// are drawn around the walker but rejected outside the ball of radius
    /// zone_count * condense-radius around the seed, so every evaluation
    /// stays in the candidate's neighborhood.
    fn ball_walk(
        &mut self,
        seed: &Solution,
        end: u64,
        baselines: &OperatorBaselines,
        best: &mut f64,
    ) -> bool {
        let params = mode_params(
            OperationMode::Condense,
            baselines,
            self.problem.dimension(),
        )
        .neighborhood;
        let ball_radius = params.zone_count as f64 * params.radius;
        let tabu_radius = self.bank.config().tabu_radius;
        let mut current = seed.clone();
        let mut improved_any = false;
        while self.counter.used() < end {
            self.log_mode(OperationMode::Condense, None);
            let trials =
                self.ball_trials(&current.position, &seed.position, ball_radius, &params, tabu_radius);
            if trials.is_empty() {
                self.advance_iteration();
                break;
            }
            let mut step_best: Option<Solution> = None;
            {
                let mut ctx = self.ctx();
                for point in trials {
                    let solution = ctx.evaluate_and_record(point);
                    if step_best.as_ref().is_none_or(|b| solution.value < b.value) {
                        step_best = Some(solution);
                    }
                }
            }
            current = step_best.expect("trials were evaluated");
            if current.value < *best {
                *best = current.value;
                improved_any = true;
            }
            self.bank.recentness.push(&current.position);
            self.advance_iteration();
        }
        improved_any
    }

    /// Zone trials around `center` kept inside the ball around `anchor`.
    fn ball_trials(
        &mut self,
        center: &[f64],
        anchor: &[f64],
        ball_radius: f64,
        params: &NeighborhoodParams,
        tabu_radius: f64,
    ) -> Vec<Vec<f64>> {
        let mut points = Vec::with_capacity(params.zone_count * params.trials_per_zone);
        for zone in 1..=params.zone_count {
            let inner = (zone - 1) as f64 * params.radius;
            let outer = zone as f64 * params.radius;
            for _ in 0..params.trials_per_zone {
                for _ in 0..20 {
                    let direction = sample_unit_direction(center.len(), &mut self.rng);
                    let radius = inner + (1.0 - self.rng.random::<f64>()) * (outer - inner);
                    let raw: Vec<f64> = center
                        .iter()
                        .zip(&direction)
                        .map(|(c, d)| c + radius * d)
                        .collect();
                    let clipped = self.problem.clip(&raw);
                    let distance = euclidean(&clipped, center);
                    if distance <= inner || distance > outer {
                        continue;
                    }
                    if euclidean(&clipped, anchor) > ball_radius {
                        continue;
                    }
                    if self.bank.is_tabu(&clipped, tabu_radius) {
                        continue;
                    }
                    points.push(clipped);
                    break;
                }
            }
        }
        points
    }

    /// Final search: per-coordinate similarity analysis over the top elites
    /// freezes agreeing coordinates at their mean; the remaining coordinates
    /// are re-optimized by a condense-mode tabu walk. With full agreement
    /// only the consensus point is evaluated; with none, the incumbent is
    /// polished unmasked.
    pub fn final_search(&mut self) {
        self.enter_stage(StageTag::Final);
        let stage_end = self.counter.used() + self.plan.budget_final;
        let elites: Vec<Vec<f64>> = self
            .bank
            .elite
            .deep()
            .iter()
            .take(self.plan.intensive_candidates)
            .map(|e| e.solution.position.clone())
            .collect();
        if elites.is_empty() {
            return;
        }
        let widths: Vec<f64> = (0..self.problem.dimension())
            .map(|i| self.problem.width(i))
            .collect();
        let frozen = similarity_freeze(
            &elites,
            &widths,
            self.plan.similarity_tolerance,
            self.plan.agreement_fraction,
        );
        let unfrozen: Vec<usize> = frozen
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| i)
            .collect();

        let incumbent = self
            .trace
            .best()
            .expect("earlier stages evaluated")
            .clone();

        if unfrozen.is_empty() {
            // full agreement: the consensus point is the only candidate
            let consensus: Vec<f64> = frozen.iter().map(|v| v.expect("all frozen")).collect();
            let clipped = self.problem.clip(&consensus);
            self.ctx().evaluate_and_record(clipped);
            self.advance_iteration();
            return;
        }

        let start = if unfrozen.len() == frozen.len() {
            // no coordinate frozen: plain polish of the incumbent
            incumbent.position.clone()
        } else {
            let mut position = incumbent.position.clone();
            for (i, value) in frozen.iter().enumerate() {
                if let Some(v) = value {
                    position[i] = *v;
                }
            }
            position
        };
        let clipped = self.problem.clip(&start);
        let mut current = self.ctx().evaluate_and_record(clipped);
        self.advance_iteration();

        let params = mode_params(
            OperationMode::Condense,
            &self.baselines,
            self.problem.dimension(),
        )
        .neighborhood;
        while self.counter.used() < stage_end {
            self.log_mode(OperationMode::Condense, None);
            let trials = self.masked_trials(&current.position, &unfrozen, &params);
            if trials.is_empty() {
                self.advance_iteration();
                break;
            }
            let mut best: Option<Solution> = None;
            {
                let mut ctx = self.ctx();
                for point in trials {
                    let solution = ctx.evaluate_and_record(point);
                    if best.as_ref().is_none_or(|b| solution.value < b.value) {
                        best = Some(solution);
                    }
                }
            }
            current = best.expect("trials were evaluated");
            self.bank.recentness.push(&current.position);
            self.advance_iteration();
        }
    }

    /// Zone trials that perturb only the unfrozen coordinates.
    fn masked_trials(
        &mut self,
        center: &[f64],
        unfrozen: &[usize],
        params: &NeighborhoodParams,
    ) -> Vec<Vec<f64>> {
        let tabu_radius = self.bank.config().tabu_radius;
        let mut points = Vec::with_capacity(params.zone_count * params.trials_per_zone);
        for zone in 1..=params.zone_count {
            let inner = (zone - 1) as f64 * params.radius;
            let outer = zone as f64 * params.radius;
            for _ in 0..params.trials_per_zone {
                for _ in 0..20 {
                    let direction = sample_unit_direction(unfrozen.len(), &mut self.rng);
                    let radius = inner + (1.0 - self.rng.random::<f64>()) * (outer - inner);
                    let mut raw = center.to_vec();
                    for (j, &dim) in unfrozen.iter().enumerate() {
                        raw[dim] += radius * direction[j];
                    }
                    let clipped = self.problem.clip(&raw);
                    let distance = euclidean(&clipped, center);
                    if distance <= inner || distance > outer {
                        continue;
                    }
                    if self.bank.is_tabu(&clipped, tabu_radius) {
                        continue;
                    }
                    points.push(clipped);
                    break;
                }
            }
        }
        points
    }

    pub fn finish(self, wrapper: WrapperKind) -> RunReport {
        let snapshot = self.bank.snapshot();
        let (trace, best) = self.trace.into_parts();
        RunReport {
            problem_name: self.problem.name().to_string(),
            dimension: self.problem.dimension(),
            driver: self.driver_config.kind,
            wrapper,
            seed: self.seed,
            total_evaluations: self.counter.used(),
            best: best.expect("a run evaluates at least the gentry"),
            trace,
            stage_boundaries: self.stage_boundaries,
            restarts: self.restarts,
            mode_log: self.mode_log,
            bursts: self.bursts,
            snapshot,
        }
    }
}

fn improved(before: Option<f64>, after: Option<f64>) -> bool {
    match (before, after) {
        (None, Some(_)) => true,
        (Some(b), Some(a)) => a < b,
        _ => false,
    }
}

/// Executes the five stages in order and returns the report.
pub fn run(
    plan: &StagePlan,
    problem: &Problem,
    driver_config: &DriverConfig,
    memory_config: &MemoryConfig,
    baselines: &OperatorBaselines,
    seed: u64,
) -> Result<RunReport, PlanError> {
    let mut state = DhsRun::new(
        plan.clone(),
        problem,
        driver_config.clone(),
        memory_config.clone(),
        baselines.clone(),
        seed,
    )?;
    state.initial_search();
    state.exploratory_search();
    state.mixed_search();
    state.intensive_search();
    state.final_search();
    Ok(state.finish(WrapperKind::Dhs))
}

/// Runs the driver alone in normal mode for the whole budget; memories
/// record every visit but do not steer the search.
pub fn run_plain(
    problem: &Problem,
    driver_config: &DriverConfig,
    memory_config: &MemoryConfig,
    baselines: &OperatorBaselines,
    total_budget: u64,
    seed: u64,
) -> Result<RunReport, PlanError> {
    match driver_config.kind {
        DriverKind::Ga if driver_config.mu < 2 => {
            return Err(PlanError::GaNeedsPair(driver_config.mu));
        }
        DriverKind::Es
            if driver_config.selection == Selection::Comma
                && driver_config.lambda < driver_config.mu =>
        {
            return Err(PlanError::CommaNeedsLambda {
                mu: driver_config.mu,
                lambda: driver_config.lambda,
            });
        }
        _ => {}
    }
    let mut bank = MemoryBank::new(problem, memory_config.clone())?;
    let mut counter = EvalCounter::new();
    let mut trace = RunTrace::new(StageTag::Plain);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mode_log = Vec::new();
    let mut iteration = 0u64;

    let mut seeds = Vec::with_capacity(driver_config.seed_count());
    for _ in 0..driver_config.seed_count() {
        let position: Vec<f64> = (0..problem.dimension())
            .map(|i| rng.random_range(problem.lower_bounds()[i]..=problem.upper_bounds()[i]))
            .collect();
        let mut ctx = SearchContext {
            problem,
            bank: &mut bank,
            counter: &mut counter,
            trace: &mut trace,
            rng: &mut rng,
            iteration,
        };
        seeds.push(ctx.evaluate_and_record(position));
    }
    let mut driver = Driver::new(driver_config.clone(), seeds, problem);
    bank.tick(iteration).expect("first tick");
    iteration += 1;

    while counter.used() < total_budget {
        mode_log.push(ModeEvent {
            stage: StageTag::Plain,
            mode: OperationMode::Normal,
            burst: None,
        });
        {
            let mut ctx = SearchContext {
                problem,
                bank: &mut bank,
                counter: &mut counter,
                trace: &mut trace,
                rng: &mut rng,
                iteration,
            };
            driver.step(OperationMode::Normal, baselines, &mut ctx);
        }
        bank.tick(iteration).expect("one tick per iteration");
        iteration += 1;
    }

    let snapshot = bank.snapshot();
    let (rows, best) = trace.into_parts();
    Ok(RunReport {
        problem_name: problem.name().to_string(),
        dimension: problem.dimension(),
        driver: driver_config.kind,
        wrapper: WrapperKind::Plain,
        seed,
        total_evaluations: counter.used(),
        best: best.expect("the initial sample evaluated"),
        trace: rows,
        stage_boundaries: vec![(StageTag::Plain, 0)],
        restarts: RestartCounts::default(),
        mode_log,
        bursts: Vec::new(),
        snapshot,
    })
}
