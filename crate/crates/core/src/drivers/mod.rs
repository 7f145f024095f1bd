//! Metaheuristic step functions: genetic algorithm, evolution strategy, and
//! tabu search, each re-paceable through an [`OperationMode`] so the engine
//! can stretch or focus them per search stage.
//!
//! Every step evaluates through [`SearchContext::evaluate_and_record`], so
//! evaluation counting, memory recording, and the best-value trace stay
//! consistent no matter which driver runs.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::memory::MemoryBank;
use crate::operators::{
    arithmetic_crossover, mode_params, neighborhood_trials, self_adaptive_mutation,
    OperationMode, OperatorBaselines,
};
use crate::problems::{evaluate, EvalCounter, Problem, Solution};
use crate::report::RunTrace;

/// The metaheuristic hosted by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriverKind {
    Ga,
    Es,
    Ts,
}

impl DriverKind {
    pub fn label(&self) -> &'static str {
        match self {
            DriverKind::Ga => "ga",
            DriverKind::Es => "es",
            DriverKind::Ts => "ts",
        }
    }

    pub const ALL: [DriverKind; 3] = [DriverKind::Ga, DriverKind::Es, DriverKind::Ts];
}

impl fmt::Display for DriverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DriverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ga" => Ok(DriverKind::Ga),
            "es" => Ok(DriverKind::Es),
            "ts" => Ok(DriverKind::Ts),
            other => Err(format!("unknown driver `{other}` (expected ga, es, or ts)")),
        }
    }
}

/// Survivor selection of the evolution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// (mu + lambda): parents compete with offspring.
    Plus,
    /// (mu, lambda): offspring only; requires lambda >= mu.
    Comma,
}

/// Driver hyperparameters. Fields not applicable to a kind are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverConfig {
    pub kind: DriverKind,
    /// Population size (GA, ES).
    pub mu: usize,
    /// Offspring per generation (ES).
    pub lambda: usize,
    pub selection: Selection,
    /// GA per-component mutation probability; defaults to 1/n.
    pub mutation_probability: Option<f64>,
    /// GA mutation spread as a fraction of each dimension's width.
    pub mutation_sigma_fraction: f64,
    /// ES initial step size as a fraction of each dimension's width.
    pub initial_sigma_fraction: f64,
}

impl DriverConfig {
    pub fn for_kind(kind: DriverKind) -> Self {
        let (mu, lambda) = match kind {
            DriverKind::Ga => (20, 20),
            DriverKind::Es => (5, 25),
            DriverKind::Ts => (1, 1),
        };
        Self {
            kind,
            mu,
            lambda,
            selection: Selection::Plus,
            mutation_probability: None,
            mutation_sigma_fraction: 0.05,
            initial_sigma_fraction: 0.1,
        }
    }

    /// Solutions consumed when (re)seeding the driver state.
    pub fn seed_count(&self) -> usize {
        match self.kind {
            DriverKind::Ts => 1,
            _ => self.mu,
        }
    }
}

/// A population member; `sigma` carries the ES strategy vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub solution: Solution,
    pub sigma: Option<Vec<f64>>,
}

/// An evaluated population kept sorted ascending by objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Member>,
    pub mu: usize,
}

impl Population {
    pub fn from_solutions(mut solutions: Vec<Solution>, mu: usize) -> Self {
        solutions.sort_by(|a, b| a.value.total_cmp(&b.value));
        solutions.truncate(mu);
        Self {
            members: solutions
                .into_iter()
                .map(|solution| Member {
                    solution,
                    sigma: None,
                })
                .collect(),
            mu,
        }
    }

    /// Assigns every member the same initial strategy vector.
    pub fn with_uniform_sigma(mut self, sigma: Vec<f64>) -> Self {
        for member in &mut self.members {
            member.sigma = Some(sigma.clone());
        }
        self
    }

    pub fn best(&self) -> &Solution {
        &self.members[0].solution
    }

    fn select_survivors(&mut self, mut pool: Vec<Member>) {
        pool.sort_by(|a, b| a.solution.value.total_cmp(&b.solution.value));
        pool.truncate(self.mu);
        self.members = pool;
    }
}

/// Outcome of one driver step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub evaluations: u64,
    /// Tabu search only: every trial was tabu or exhausted, so the current
    /// point did not move.
    pub stalled: bool,
}

/// Everything a driver step needs from the surrounding run.
pub struct SearchContext<'a> {
    pub problem: &'a Problem,
    pub bank: &'a mut MemoryBank,
    pub counter: &'a mut EvalCounter,
    pub trace: &'a mut RunTrace,
    pub rng: &'a mut ChaCha8Rng,
    pub iteration: u64,
}

impl SearchContext<'_> {
    /// Evaluates a position, records it into every memory, and feeds the
    /// best-value trace. The position must match the problem dimension.
    pub fn evaluate_and_record(&mut self, position: Vec<f64>) -> Solution {
        let solution = evaluate(self.problem, self.counter, position, self.iteration)
            .expect("driver produced a position of the problem dimension");
        self.bank.record_visit(&solution, self.iteration);
        self.trace.observe(self.counter.used(), &solution);
        solution
    }

    pub fn evaluations(&self) -> u64 {
        self.counter.used()
    }
}

/// Binary tournament: two uniform picks, better one wins, ties to the
/// earlier (better-ranked) index.
fn tournament_pick<R: Rng>(population: &Population, rng: &mut R) -> usize {
    let a = rng.random_range(0..population.members.len());
    let b = rng.random_range(0..population.members.len());
    let va = population.members[a].solution.value;
    let vb = population.members[b].solution.value;
    if vb < va {
        b
    } else if va < vb {
        a
    } else {
        a.min(b)
    }
}

/// One genetic-algorithm generation: binary-tournament parent selection,
/// mode-paced arithmetic crossover, per-component Gaussian perturbation, and
/// (mu + offspring) truncation replacement.
pub fn ga_step(
    population: &mut Population,
    mode: OperationMode,
    baselines: &OperatorBaselines,
    config: &DriverConfig,
    ctx: &mut SearchContext,
) -> StepOutcome {
    let n = ctx.problem.dimension();
    let params = mode_params(mode, baselines, n);
    let p_m = config
        .mutation_probability
        .unwrap_or(1.0 / n as f64)
        .clamp(0.0, 1.0);
    let spreads: Vec<f64> = (0..n)
        .map(|i| config.mutation_sigma_fraction * ctx.problem.width(i))
        .collect();
    let before = ctx.evaluations();

    let mut offspring = Vec::with_capacity(population.mu);
    while offspring.len() < population.mu {
        let p1 = tournament_pick(population, ctx.rng);
        let p2 = tournament_pick(population, ctx.rng);
        let lambda = params.crossover.sample_lambda(ctx.rng);
        let (c1, c2) = arithmetic_crossover(
            &population.members[p1].solution.position,
            &population.members[p2].solution.position,
            lambda,
        )
        .expect("population members share the problem dimension");
        for mut child in [c1, c2] {
            if offspring.len() == population.mu {
                break;
            }
            for (i, x) in child.iter_mut().enumerate() {
                if ctx.rng.random::<f64>() < p_m {
                    let draw: f64 = ctx.rng.sample(StandardNormal);
                    *x += spreads[i] * draw;
                }
            }
            let clipped = ctx.problem.clip(&child);
            let solution = ctx.evaluate_and_record(clipped);
            offspring.push(Member {
                solution,
                sigma: None,
            });
        }
    }

    let mut pool = population.members.clone();
    pool.extend(offspring);
    population.select_survivors(pool);

    StepOutcome {
        evaluations: ctx.evaluations() - before,
        stalled: false,
    }
}

/// One evolution-strategy generation: every offspring is drawn from a
/// uniformly chosen parent by self-adaptive mutation and carries its mutated
/// step-size vector; survivors by (mu + lambda) or (mu, lambda).
pub fn es_step(
    population: &mut Population,
    mode: OperationMode,
    baselines: &OperatorBaselines,
    config: &DriverConfig,
    ctx: &mut SearchContext,
) -> StepOutcome {
    let params = mode_params(mode, baselines, ctx.problem.dimension()).mutation;
    let before = ctx.evaluations();

    let mut offspring = Vec::with_capacity(config.lambda);
    for _ in 0..config.lambda {
        let parent = &population.members[ctx.rng.random_range(0..population.members.len())];
        let sigma = parent
            .sigma
            .as_ref()
            .expect("evolution-strategy members carry strategy vectors");
        let (raw, theta) =
            self_adaptive_mutation(&parent.solution.position, sigma, &params, ctx.rng)
                .expect("strategy vectors stay positive");
        let clipped = ctx.problem.clip(&raw);
        let solution = ctx.evaluate_and_record(clipped);
        offspring.push(Member {
            solution,
            sigma: Some(theta),
        });
    }

    let pool = match config.selection {
        Selection::Plus => {
            let mut pool = population.members.clone();
            pool.extend(offspring);
            pool
        }
        Selection::Comma => offspring,
    };
    population.select_survivors(pool);

    StepOutcome {
        evaluations: ctx.evaluations() - before,
        stalled: false,
    }
}

/// One tabu-search move: mode-paced neighborhood trials filtered by the
/// recentness memory, all non-tabu trials evaluated, and the best accepted
/// even when worse than the current point.
pub fn ts_step(
    current: &mut Solution,
    mode: OperationMode,
    baselines: &OperatorBaselines,
    ctx: &mut SearchContext,
) -> StepOutcome {
    let params = mode_params(mode, baselines, ctx.problem.dimension()).neighborhood;
    let radius = ctx.bank.config().tabu_radius;
    let before = ctx.evaluations();
    let trials = neighborhood_trials(
        ctx.problem,
        &current.position,
        &params,
        &ctx.bank.recentness,
        radius,
        ctx.rng,
    );
    if trials.points.is_empty() {
        return StepOutcome {
            evaluations: 0,
            stalled: true,
        };
    }

    let mut best: Option<Solution> = None;
    for point in trials.points {
        let solution = ctx.evaluate_and_record(point);
        let better = best.as_ref().is_none_or(|b| solution.value < b.value);
        if better {
            best = Some(solution);
        }
    }
    *current = best.expect("at least one trial was evaluated");
    ctx.bank.recentness.push(&current.position);

    StepOutcome {
        evaluations: ctx.evaluations() - before,
        stalled: false,
    }
}

/// Driver state: a population for GA/ES, a single point for TS.
#[derive(Debug, Clone, PartialEq)]
pub enum DriverState {
    Population(Population),
    Point(Solution),
}

/// A configured driver plus its evolving state.
pub struct Driver {
    pub config: DriverConfig,
    pub state: DriverState,
}

impl Driver {
    /// Builds the driver state from seed solutions (the best are kept).
    pub fn new(config: DriverConfig, seeds: Vec<Solution>, problem: &Problem) -> Self {
        let state = Self::state_from(&config, seeds, problem);
        Self { config, state }
    }

    fn state_from(config: &DriverConfig, mut seeds: Vec<Solution>, problem: &Problem) -> DriverState {
        assert!(!seeds.is_empty(), "driver needs at least one seed solution");
        match config.kind {
            DriverKind::Ts => {
                seeds.sort_by(|a, b| a.value.total_cmp(&b.value));
                DriverState::Point(seeds.swap_remove(0))
            }
            DriverKind::Ga => {
                DriverState::Population(Population::from_solutions(seeds, config.mu))
            }
            DriverKind::Es => {
                let sigma: Vec<f64> = (0..problem.dimension())
                    .map(|i| config.initial_sigma_fraction * problem.width(i))
                    .collect();
                DriverState::Population(
                    Population::from_solutions(seeds, config.mu).with_uniform_sigma(sigma),
                )
            }
        }
    }

    /// Discards the current state and reseeds it (restart semantics).
    pub fn reinit(&mut self, seeds: Vec<Solution>, problem: &Problem) {
        self.state = Self::state_from(&self.config, seeds, problem);
    }

    /// Diversification injection: replaces the worst members (or moves the
    /// TS point) with fresh solutions.
    pub fn inject(&mut self, fresh: Vec<Solution>, problem: &Problem) {
        if fresh.is_empty() {
            return;
        }
        match &mut self.state {
            DriverState::Point(current) => {
                let best = fresh
                    .into_iter()
                    .min_by(|a, b| a.value.total_cmp(&b.value))
                    .expect("non-empty");
                *current = best;
            }
            DriverState::Population(population) => {
                let sigma: Option<Vec<f64>> = match self.config.kind {
                    DriverKind::Es => Some(
                        (0..problem.dimension())
                            .map(|i| self.config.initial_sigma_fraction * problem.width(i))
                            .collect(),
                    ),
                    _ => None,
                };
                let keep = population.members.len().saturating_sub(fresh.len());
                population.members.truncate(keep);
                population.members.extend(fresh.into_iter().map(|solution| Member {
                    solution,
                    sigma: sigma.clone(),
                }));
                population
                    .members
                    .sort_by(|a, b| a.solution.value.total_cmp(&b.solution.value));
            }
        }
    }

    pub fn step(
        &mut self,
        mode: OperationMode,
        baselines: &OperatorBaselines,
        ctx: &mut SearchContext,
    ) -> StepOutcome {
        match &mut self.state {
            DriverState::Population(population) => match self.config.kind {
                DriverKind::Ga => ga_step(population, mode, baselines, &self.config, ctx),
                DriverKind::Es => es_step(population, mode, baselines, &self.config, ctx),
                DriverKind::Ts => unreachable!("TS state is a point"),
            },
            DriverState::Point(current) => ts_step(current, mode, baselines, ctx),
        }
    }

    pub fn best(&self) -> &Solution {
        match &self.state {
            DriverState::Population(population) => population.best(),
            DriverState::Point(current) => current,
        }
    }

    /// Upper bound on evaluations a single step can consume.
    pub fn max_step_evaluations(&self, baselines: &OperatorBaselines) -> u64 {
        match self.config.kind {
            DriverKind::Ga => self.config.mu as u64,
            DriverKind::Es => self.config.lambda as u64,
            DriverKind::Ts => (baselines.zone_count * baselines.trials_per_zone) as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::MemoryConfig;
    use crate::problems::benchmark;
    use crate::report::StageTag;
    use rand::SeedableRng;

    struct Harness {
        problem: Problem,
        bank: MemoryBank,
        counter: EvalCounter,
        trace: RunTrace,
        rng: ChaCha8Rng,
        baselines: OperatorBaselines,
    }

    impl Harness {
        fn new(problem_name: &str, dimension: usize, seed: u64) -> Self {
            let problem = benchmark(problem_name, dimension).unwrap();
            let bank = MemoryBank::new(&problem, MemoryConfig::for_problem(&problem)).unwrap();
            let baselines = OperatorBaselines::for_problem(&problem);
            Self {
                problem,
                bank,
                counter: EvalCounter::new(),
                trace: RunTrace::new(StageTag::Plain),
                rng: ChaCha8Rng::seed_from_u64(seed),
                baselines,
            }
        }

        fn ctx(&mut self) -> SearchContext<'_> {
            SearchContext {
                problem: &self.problem,
                bank: &mut self.bank,
                counter: &mut self.counter,
                trace: &mut self.trace,
                rng: &mut self.rng,
                iteration: 0,
            }
        }

        fn seed_population(&mut self, count: usize) -> Vec<Solution> {
            let mut seeds = Vec::with_capacity(count);
            for _ in 0..count {
                let position: Vec<f64> = (0..self.problem.dimension())
                    .map(|i| {
                        self.rng.random_range(
                            self.problem.lower_bounds()[i]..=self.problem.upper_bounds()[i],
                        )
                    })
                    .collect();
                let mut ctx = self.ctx();
                seeds.push(ctx.evaluate_and_record(position));
            }
            seeds
        }
    }

    #[test]
    fn ga_crossover_of_identical_parents_reproduces_them() {
        let mut h = Harness::new("sphere", 3, 1);
        let parent = {
            let mut ctx = h.ctx();
            ctx.evaluate_and_record(vec![1.0, 2.0, -1.0])
        };
        let mut population =
            Population::from_solutions(vec![parent.clone(), parent.clone()], 2);
        let mut config = DriverConfig::for_kind(DriverKind::Ga);
        config.mu = 2;
        config.mutation_probability = Some(0.0); // isolate the crossover
        let baselines = h.baselines.clone();
        let mut ctx = h.ctx();
        ga_step(&mut population, OperationMode::Normal, &baselines, &config, &mut ctx);
        for member in &population.members {
            assert_eq!(member.solution.position, parent.position);
        }
    }

    #[test]
    fn ga_step_is_deterministic_under_a_seed() {
        let run = || {
            let mut h = Harness::new("sphere", 4, 77);
            let seeds = h.seed_population(6);
            let mut population = Population::from_solutions(seeds, 6);
            let config = {
                let mut c = DriverConfig::for_kind(DriverKind::Ga);
                c.mu = 6;
                c
            };
            let baselines = h.baselines.clone();
            let mut ctx = h.ctx();
            ga_step(&mut population, OperationMode::Normal, &baselines, &config, &mut ctx);
            population
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn ga_improves_on_sphere_for_nearly_all_seeds() {
        let mut improved = 0;
        for seed in 0..100u64 {
            let mut h = Harness::new("sphere", 5, seed);
            let seeds = h.seed_population(20);
            let mut population = Population::from_solutions(seeds, 20);
            let initial_best = population.best().value;
            let config = DriverConfig::for_kind(DriverKind::Ga);
            let baselines = h.baselines.clone();
            for _ in 0..50 {
                let mut ctx = h.ctx();
                ga_step(&mut population, OperationMode::Normal, &baselines, &config, &mut ctx);
            }
            if population.best().value < initial_best {
                improved += 1;
            }
        }
        assert!(improved >= 95, "only {improved} of 100 seeds improved");
    }

    #[test]
    fn es_zero_learning_rate_keeps_strategy_vectors() {
        let mut h = Harness::new("sphere", 3, 5);
        let seeds = h.seed_population(4);
        let sigma = vec![0.5; 3];
        let mut population =
            Population::from_solutions(seeds, 4).with_uniform_sigma(sigma.clone());
        let mut baselines = h.baselines.clone();
        baselines.learning_rate = 0.0;
        baselines.theta_min = 0.0;
        let mut config = DriverConfig::for_kind(DriverKind::Es);
        config.mu = 4;
        config.lambda = 8;
        let mut ctx = h.ctx();
        es_step(&mut population, OperationMode::Normal, &baselines, &config, &mut ctx);
        for member in &population.members {
            assert_eq!(member.sigma.as_ref().unwrap(), &sigma);
        }
    }

    #[test]
    fn one_plus_one_es_never_worsens() {
        let mut h = Harness::new("sphere", 2, 3);
        let seeds = h.seed_population(1);
        let initial = seeds[0].value;
        let sigma = vec![1.0; 2];
        let mut population = Population::from_solutions(seeds, 1).with_uniform_sigma(sigma);
        let mut config = DriverConfig::for_kind(DriverKind::Es);
        config.mu = 1;
        config.lambda = 1;
        let baselines = h.baselines.clone();
        let mut last = initial;
        for _ in 0..200 {
            let mut ctx = h.ctx();
            es_step(&mut population, OperationMode::Normal, &baselines, &config, &mut ctx);
            let best = population.best().value;
            assert!(best <= last, "plus selection worsened {last} -> {best}");
            last = best;
        }
        assert!(last <= initial);
    }

    #[test]
    fn five_plus_twentyfive_es_converges_on_sphere() {
        let mut initial_medians = Vec::new();
        let mut final_medians = Vec::new();
        for seed in 0..20u64 {
            let mut h = Harness::new("sphere", 10, seed);
            let seeds = h.seed_population(5);
            let sigma: Vec<f64> = (0..10).map(|i| 0.1 * h.problem.width(i)).collect();
            let mut population = Population::from_solutions(seeds, 5).with_uniform_sigma(sigma);
            initial_medians.push(population.best().value);
            let config = DriverConfig::for_kind(DriverKind::Es);
            let baselines = h.baselines.clone();
            for _ in 0..100 {
                let mut ctx = h.ctx();
                es_step(&mut population, OperationMode::Normal, &baselines, &config, &mut ctx);
            }
            final_medians.push(population.best().value);
        }
        initial_medians.sort_by(f64::total_cmp);
        final_medians.sort_by(f64::total_cmp);
        let initial = initial_medians[10];
        let fin = final_medians[10];
        assert!(
            fin < 0.01 * initial,
            "median {fin} not below 1% of initial median {initial}"
        );
    }

    #[test]
    fn comma_selection_keeps_offspring_only() {
        let mut h = Harness::new("sphere", 2, 15);
        let seeds = h.seed_population(3);
        let parent_positions: Vec<Vec<f64>> =
            seeds.iter().map(|s| s.position.clone()).collect();
        let mut population =
            Population::from_solutions(seeds, 3).with_uniform_sigma(vec![0.5; 2]);
        let mut config = DriverConfig::for_kind(DriverKind::Es);
        config.mu = 3;
        config.lambda = 9;
        config.selection = Selection::Comma;
        let baselines = h.baselines.clone();
        let mut ctx = h.ctx();
        es_step(&mut population, OperationMode::Normal, &baselines, &config, &mut ctx);
        assert_eq!(population.members.len(), 3);
        for member in &population.members {
            assert!(
                !parent_positions.contains(&member.solution.position),
                "a parent survived comma selection"
            );
        }
    }

    #[test]
    fn ts_accepts_the_best_non_improving_move() {
        let mut h = Harness::new("sphere", 2, 9);
        // start at the optimum: every trial is worse, one must still be taken
        let mut current = {
            let mut ctx = h.ctx();
            ctx.evaluate_and_record(vec![0.0, 0.0])
        };
        let baselines = h.baselines.clone();
        let mut ctx = h.ctx();
        let outcome = ts_step(&mut current, OperationMode::Normal, &baselines, &mut ctx);
        assert!(!outcome.stalled);
        assert!(current.value > 0.0, "moved off the optimum");
    }

    #[test]
    fn ts_moves_to_an_improving_trial_when_one_exists() {
        let mut h = Harness::new("sphere", 2, 11);
        let mut current = {
            let mut ctx = h.ctx();
            ctx.evaluate_and_record(vec![4.0, 4.0])
        };
        let start_value = current.value;
        let baselines = h.baselines.clone();
        let mut ctx = h.ctx();
        ts_step(&mut current, OperationMode::Normal, &baselines, &mut ctx);
        assert!(current.value < start_value);
    }

    #[test]
    fn tabu_trials_are_never_evaluated() {
        let count_evals = |blanket_tabu: bool| {
            let mut h = Harness::new("sphere", 2, 13);
            let mut config = MemoryConfig::for_problem(&h.problem);
            if blanket_tabu {
                // tabu ball larger than the whole trial neighborhood
                config.tabu_radius = h.problem.diagonal();
            }
            h.bank = MemoryBank::new(&h.problem, config).unwrap();
            let mut current = {
                let mut ctx = h.ctx();
                ctx.evaluate_and_record(vec![1.0, 1.0])
            };
            let before = h.counter.used();
            let baselines = h.baselines.clone();
            let mut ctx = h.ctx();
            let outcome = ts_step(&mut current, OperationMode::Normal, &baselines, &mut ctx);
            (h.counter.used() - before, outcome.stalled)
        };
        let (evals_open, stalled_open) = count_evals(false);
        let (evals_blocked, stalled_blocked) = count_evals(true);
        assert!(evals_open > 0);
        assert!(!stalled_open);
        assert_eq!(evals_blocked, 0, "tabu trials must not be evaluated");
        assert!(stalled_blocked);
    }

    #[test]
    fn step_outcomes_account_for_every_evaluation() {
        let mut h = Harness::new("rastrigin", 3, 21);
        let seeds = h.seed_population(5);
        let mut driver = Driver::new(
            {
                let mut c = DriverConfig::for_kind(DriverKind::Es);
                c.mu = 5;
                c.lambda = 12;
                c
            },
            seeds,
            &h.problem,
        );
        let baselines = h.baselines.clone();
        for _ in 0..5 {
            let before = h.counter.used();
            let outcome = {
                let mut ctx = h.ctx();
                driver.step(OperationMode::Normal, &baselines, &mut ctx)
            };
            assert_eq!(outcome.evaluations, h.counter.used() - before);
            assert_eq!(outcome.evaluations, 12);
        }
    }
}
