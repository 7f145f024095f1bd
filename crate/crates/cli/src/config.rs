//! Flat dotted-key experiment configuration.
//!
//! One `key = value` per line, `#` starts a comment, lists are
//! comma-separated. Every unknown key is an error: typos never pass
//! silently. Unset keys take documented defaults; keys whose defaults
//! depend on the problem (tabu radius, neighborhood radius, gentry size)
//! stay unset until a run resolves them.

use std::collections::BTreeMap;
use std::fmt;

use dhs_core::drivers::{DriverConfig, DriverKind, Selection};
use dhs_core::engine::StagePlan;
use dhs_core::memory::MemoryConfig;
use dhs_core::operators::OperatorBaselines;
use dhs_core::problems::{benchmark, Problem};
use dhs_core::report::WrapperKind;

#[derive(Debug)]
pub struct ConfigError {
    /// 1-based line of the offending assignment; 0 when the violation
    /// involves defaulted values only.
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

/// Memory-bank overrides; unset fields fall back to per-problem defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MemoryOverrides {
    pub deep_capacity: Option<usize>,
    pub shallow_capacity: Option<usize>,
    pub extended_capacity: Option<usize>,
    pub elite_depth: Option<u64>,
    pub frequency_depth: Option<u64>,
    pub characteristic_depth: Option<u64>,
    pub spatial_depth: Option<u64>,
    pub recentness_capacity: Option<usize>,
    pub tabu_radius: Option<f64>,
    pub partitions_per_dim: Option<usize>,
    pub grid_dimension_cap: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageOverrides {
    /// Percent split of the total budget over the five stages.
    pub split: Option<[u64; 5]>,
    pub gentry_size: Option<usize>,
    pub coverage: Option<f64>,
    pub stagnation_exploratory: Option<u64>,
    pub stagnation_mixed: Option<u64>,
    pub restarts_exploratory: Option<u32>,
    pub restarts_mixed: Option<u32>,
    pub restarts_intensive: Option<u32>,
    pub candidates: Option<usize>,
    pub similarity_tolerance: Option<f64>,
    pub agreement: Option<f64>,
    pub burst_iterations: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OperatorOverrides {
    pub radius: Option<f64>,
    pub zones: Option<usize>,
    pub trials_per_zone: Option<usize>,
    pub expand_multiplier: Option<f64>,
    pub condense_multiplier: Option<f64>,
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DriverOverrides {
    pub mu: Option<usize>,
    pub lambda: Option<usize>,
    pub selection: Option<Selection>,
    pub mutation_probability: Option<f64>,
    pub mutation_sigma: Option<f64>,
    pub initial_sigma: Option<f64>,
}

/// A parsed, validated experiment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<(String, usize)>,
    pub drivers: Vec<DriverKind>,
    pub wrappers: Vec<WrapperKind>,
    pub seeds: Vec<u64>,
    pub budget: u64,
    pub output: String,
    /// Objective value a run must reach for the evaluations-to-threshold
    /// summary statistic.
    pub threshold: f64,
    pub memory: MemoryOverrides,
    pub stage: StageOverrides,
    pub operator: OperatorOverrides,
    pub driver: DriverOverrides,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problems: Vec::new(),
            drivers: Vec::new(),
            wrappers: vec![WrapperKind::Dhs],
            seeds: Vec::new(),
            budget: 50_000,
            output: "runs".to_string(),
            threshold: 1e-6,
            memory: MemoryOverrides::default(),
            stage: StageOverrides::default(),
            operator: OperatorOverrides::default(),
            driver: DriverOverrides::default(),
        }
    }
}

impl ExperimentConfig {
    /// Memory configuration for one problem: per-problem defaults with the
    /// config's overrides applied.
    pub fn memory_config(&self, problem: &Problem) -> MemoryConfig {
        let mut config = MemoryConfig::for_problem(problem);
        let m = &self.memory;
        if let Some(v) = m.deep_capacity {
            config.deep_capacity = v;
        }
        if let Some(v) = m.shallow_capacity {
            config.shallow_capacity = v;
        }
        if let Some(v) = m.extended_capacity {
            config.extended_capacity = v;
        }
        if let Some(v) = m.elite_depth {
            config.elite_depth = v;
        }
        if let Some(v) = m.frequency_depth {
            config.frequency_depth = v;
        }
        if let Some(v) = m.characteristic_depth {
            config.characteristic_depth = v;
        }
        if let Some(v) = m.spatial_depth {
            config.spatial_depth = v;
        }
        if let Some(v) = m.recentness_capacity {
            config.recentness_capacity = v;
        }
        if let Some(v) = m.tabu_radius {
            config.tabu_radius = v;
        }
        if let Some(v) = m.partitions_per_dim {
            config.partitions_per_dim = v;
        }
        if let Some(v) = m.grid_dimension_cap {
            config.grid_dimension_cap = v;
        }
        config
    }

    pub fn stage_plan(&self, problem: &Problem, memory: &MemoryConfig) -> StagePlan {
        let mut plan = StagePlan::for_budget(self.budget, memory.cell_count(problem.dimension()));
        let s = &self.stage;
        if let Some(split) = s.split {
            plan.budget_initial = self.budget * split[0] / 100;
            plan.budget_exploratory = self.budget * split[1] / 100;
            plan.budget_intensive = self.budget * split[3] / 100;
            plan.budget_final = self.budget * split[4] / 100;
            plan.budget_mixed = self.budget
                - plan.budget_initial
                - plan.budget_exploratory
                - plan.budget_intensive
                - plan.budget_final;
        }
        if let Some(v) = s.gentry_size {
            plan.gentry_size = v;
        }
        if let Some(v) = s.coverage {
            plan.coverage_target = v;
        }
        if let Some(v) = s.stagnation_exploratory {
            plan.stagnation_exploratory = v;
        }
        if let Some(v) = s.stagnation_mixed {
            plan.stagnation_mixed = v;
        }
        if let Some(v) = s.restarts_exploratory {
            plan.restart_limit_exploratory = v;
        }
        if let Some(v) = s.restarts_mixed {
            plan.restart_limit_mixed = v;
        }
        if let Some(v) = s.restarts_intensive {
            plan.restart_limit_intensive = v;
        }
        if let Some(v) = s.candidates {
            plan.intensive_candidates = v;
        }
        if let Some(v) = s.similarity_tolerance {
            plan.similarity_tolerance = v;
        }
        if let Some(v) = s.agreement {
            plan.agreement_fraction = v;
        }
        if let Some(v) = s.burst_iterations {
            plan.burst_iterations = v;
        }
        plan
    }

    pub fn baselines(&self, problem: &Problem) -> OperatorBaselines {
        let mut baselines = OperatorBaselines::for_problem(problem);
        let o = &self.operator;
        if let Some(v) = o.radius {
            baselines.radius = v;
        }
        if let Some(v) = o.zones {
            baselines.zone_count = v;
        }
        if let Some(v) = o.trials_per_zone {
            baselines.trials_per_zone = v;
        }
        if let Some(v) = o.expand_multiplier {
            baselines.expand_multiplier = v;
        }
        if let Some(v) = o.condense_multiplier {
            baselines.condense_multiplier = v;
        }
        if let Some(v) = o.learning_rate {
            baselines.learning_rate = v;
        }
        baselines
    }

    pub fn driver_config(&self, kind: DriverKind) -> DriverConfig {
        let mut config = DriverConfig::for_kind(kind);
        let d = &self.driver;
        if let Some(v) = d.mu {
            config.mu = v;
        }
        if let Some(v) = d.lambda {
            config.lambda = v;
        }
        if let Some(v) = d.selection {
            config.selection = v;
        }
        if let Some(v) = d.mutation_probability {
            config.mutation_probability = Some(v);
        }
        if let Some(v) = d.mutation_sigma {
            config.mutation_sigma_fraction = v;
        }
        if let Some(v) = d.initial_sigma {
            config.initial_sigma_fraction = v;
        }
        config
    }
}

struct Assignments {
    values: BTreeMap<String, (String, usize)>,
}

impl Assignments {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.values.remove(key)
    }
}

fn split_assignments(text: &str) -> Result<Assignments, ConfigError> {
    let mut values = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(ConfigError::at(
                line,
                format!("expected `key = value`, got `{stripped}`"),
            ));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::at(line, "empty key"));
        }
        // later assignments win, so command-line overrides can be appended
        values.insert(key, (value, line));
    }
    Ok(Assignments { values })
}

fn parse_scalar<T: std::str::FromStr>(
    value: &str,
    line: usize,
    kind: &str,
    key: &str,
) -> Result<T, ConfigError> {
    value
        .parse::<T>()
        .map_err(|_| ConfigError::at(line, format!("`{key}` expects {kind}, got `{value}`")))
}

fn parse_list<T>(
    value: &str,
    line: usize,
    key: &str,
    mut item: impl FnMut(&str, usize) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(ConfigError::at(line, format!("`{key}` has an empty entry")));
        }
        out.push(item(part, line)?);
    }
    Ok(out)
}

macro_rules! set_option {
    ($assignments:expr, $lines:expr, $key:literal, $slot:expr, $kind:literal, $ty:ty) => {
        if let Some((value, line)) = $assignments.take($key) {
            $slot = Some(parse_scalar::<$ty>(&value, line, $kind, $key)?);
            $lines.insert($key, line);
        }
    };
}

/// Parses and fully validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut assignments = split_assignments(text)?;
    let mut lines: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut config = ExperimentConfig::default();

    let Some((value, line)) = assignments.take("problems") else {
        return Err(ConfigError::at(0, "missing required key `problems`"));
    };
    lines.insert("problems", line);
    config.problems = parse_list(&value, line, "problems", |part, line| {
        let Some((name, dim)) = part.split_once(':') else {
            return Err(ConfigError::at(
                line,
                format!("problem `{part}` must be `name:dimension`"),
            ));
        };
        let dimension = parse_scalar::<usize>(dim.trim(), line, "an integer dimension", "problems")?;
        Ok((name.trim().to_string(), dimension))
    })?;

    let Some((value, line)) = assignments.take("drivers") else {
        return Err(ConfigError::at(0, "missing required key `drivers`"));
    };
    lines.insert("drivers", line);
    config.drivers = parse_list(&value, line, "drivers", |part, line| {
        part.parse::<DriverKind>()
            .map_err(|message| ConfigError::at(line, message))
    })?;

    let Some((value, line)) = assignments.take("seeds") else {
        return Err(ConfigError::at(0, "missing required key `seeds`"));
    };
    lines.insert("seeds", line);
    config.seeds = parse_list(&value, line, "seeds", |part, line| {
        parse_scalar::<u64>(part, line, "an integer seed", "seeds")
    })?;

    if let Some((value, line)) = assignments.take("wrappers") {
        lines.insert("wrappers", line);
        config.wrappers = parse_list(&value, line, "wrappers", |part, line| match part {
            "plain" => Ok(WrapperKind::Plain),
            "dhs" => Ok(WrapperKind::Dhs),
            other => Err(ConfigError::at(
                line,
                format!("unknown wrapper `{other}` (expected plain or dhs)"),
            )),
        })?;
    }
    if let Some((value, line)) = assignments.take("budget") {
        lines.insert("budget", line);
        config.budget = parse_scalar(&value, line, "an integer", "budget")?;
    }
    if let Some((value, _)) = assignments.take("output") {
        config.output = value;
    }
    if let Some((value, line)) = assignments.take("threshold") {
        config.threshold = parse_scalar(&value, line, "a number", "threshold")?;
    }

    set_option!(assignments, lines, "memory.N_d", config.memory.deep_capacity, "an integer", usize);
    set_option!(assignments, lines, "memory.N_s", config.memory.shallow_capacity, "an integer", usize);
    set_option!(assignments, lines, "memory.N_x", config.memory.extended_capacity, "an integer", usize);
    set_option!(assignments, lines, "memory.d_e", config.memory.elite_depth, "an integer", u64);
    set_option!(assignments, lines, "memory.d_f", config.memory.frequency_depth, "an integer", u64);
    set_option!(assignments, lines, "memory.d_c", config.memory.characteristic_depth, "an integer", u64);
    set_option!(assignments, lines, "memory.d_s", config.memory.spatial_depth, "an integer", u64);
    set_option!(assignments, lines, "memory.d_r", config.memory.recentness_capacity, "an integer", usize);
    set_option!(assignments, lines, "memory.tabu_radius", config.memory.tabu_radius, "a number", f64);
    set_option!(assignments, lines, "memory.partitions_per_dim", config.memory.partitions_per_dim, "an integer", usize);
    set_option!(assignments, lines, "memory.grid_dim_cap", config.memory.grid_dimension_cap, "an integer", usize);

    if let Some((value, line)) = assignments.take("stage.split") {
        lines.insert("stage.split", line);
        let parts: Vec<u64> = value
            .split('/')
            .map(|p| parse_scalar::<u64>(p.trim(), line, "an integer percent", "stage.split"))
            .collect::<Result<_, _>>()?;
        if parts.len() != 5 {
            return Err(ConfigError::at(
                line,
                "`stage.split` expects five percentages like 5/20/45/20/10",
            ));
        }
        if parts.iter().sum::<u64>() != 100 {
            return Err(ConfigError::at(line, "`stage.split` must sum to 100"));
        }
        config.stage.split = Some([parts[0], parts[1], parts[2], parts[3], parts[4]]);
    }
    set_option!(assignments, lines, "stage.gentry", config.stage.gentry_size, "an integer", usize);
    set_option!(assignments, lines, "stage.coverage", config.stage.coverage, "a number", f64);
    set_option!(assignments, lines, "stage.stagnation_exploratory", config.stage.stagnation_exploratory, "an integer", u64);
    set_option!(assignments, lines, "stage.stagnation_mixed", config.stage.stagnation_mixed, "an integer", u64);
    set_option!(assignments, lines, "stage.restarts_exploratory", config.stage.restarts_exploratory, "an integer", u32);
    set_option!(assignments, lines, "stage.restarts_mixed", config.stage.restarts_mixed, "an integer", u32);
    set_option!(assignments, lines, "stage.restarts_intensive", config.stage.restarts_intensive, "an integer", u32);
    set_option!(assignments, lines, "stage.candidates", config.stage.candidates, "an integer", usize);
    set_option!(assignments, lines, "stage.similarity_tolerance", config.stage.similarity_tolerance, "a number", f64);
    set_option!(assignments, lines, "stage.agreement", config.stage.agreement, "a number", f64);
    set_option!(assignments, lines, "stage.burst_iterations", config.stage.burst_iterations, "an integer", u64);

    set_option!(assignments, lines, "operator.radius", config.operator.radius, "a number", f64);
    set_option!(assignments, lines, "operator.zones", config.operator.zones, "an integer", usize);
    set_option!(assignments, lines, "operator.trials_per_zone", config.operator.trials_per_zone, "an integer", usize);
    set_option!(assignments, lines, "operator.expand_multiplier", config.operator.expand_multiplier, "a number", f64);
    set_option!(assignments, lines, "operator.condense_multiplier", config.operator.condense_multiplier, "a number", f64);
    set_option!(assignments, lines, "operator.learning_rate", config.operator.learning_rate, "a number", f64);

    set_option!(assignments, lines, "driver.mu", config.driver.mu, "an integer", usize);
    set_option!(assignments, lines, "driver.lambda", config.driver.lambda, "an integer", usize);
    if let Some((value, line)) = assignments.take("driver.selection") {
        lines.insert("driver.selection", line);
        config.driver.selection = Some(match value.as_str() {
            "plus" => Selection::Plus,
            "comma" => Selection::Comma,
            other => {
                return Err(ConfigError::at(
                    line,
                    format!("unknown selection `{other}` (expected plus or comma)"),
                ));
            }
        });
    }
    set_option!(assignments, lines, "driver.mutation_probability", config.driver.mutation_probability, "a number", f64);
    set_option!(assignments, lines, "driver.mutation_sigma", config.driver.mutation_sigma, "a number", f64);
    set_option!(assignments, lines, "driver.initial_sigma", config.driver.initial_sigma, "a number", f64);

    if let Some((key, (_, line))) = assignments.values.iter().next() {
        return Err(ConfigError::at(*line, format!("unknown key `{key}`")));
    }

    validate(&config, &lines)?;
    Ok(config)
}

fn validate(
    config: &ExperimentConfig,
    lines: &BTreeMap<&'static str, usize>,
) -> Result<(), ConfigError> {
    let line_of = |key: &str| lines.get(key).copied().unwrap_or(0);

    if config.problems.is_empty() {
        return Err(ConfigError::at(line_of("problems"), "`problems` is empty"));
    }
    if config.drivers.is_empty() {
        return Err(ConfigError::at(line_of("drivers"), "`drivers` is empty"));
    }
    if config.seeds.is_empty() {
        return Err(ConfigError::at(line_of("seeds"), "`seeds` is empty"));
    }
    if config.wrappers.is_empty() {
        return Err(ConfigError::at(line_of("wrappers"), "`wrappers` is empty"));
    }
    if config.budget == 0 {
        return Err(ConfigError::at(line_of("budget"), "`budget` must be positive"));
    }
    if let Some(coverage) = config.stage.coverage {
        if !(coverage > 0.0 && coverage <= 1.0) {
            return Err(ConfigError::at(
                line_of("stage.coverage"),
                format!("`stage.coverage` must lie in (0, 1], got {coverage}"),
            ));
        }
    }
    if let Some(agreement) = config.stage.agreement {
        if !(agreement > 0.0 && agreement <= 1.0) {
            return Err(ConfigError::at(
                line_of("stage.agreement"),
                format!("`stage.agreement` must lie in (0, 1], got {agreement}"),
            ));
        }
    }

    // every (problem, driver) pair must build a valid run
    for (name, dimension) in &config.problems {
        let problem = benchmark(name, *dimension).map_err(|e| {
            ConfigError::at(line_of("problems"), e.to_string())
        })?;
        let memory = config.memory_config(&problem);
        memory.validate(problem.dimension()).map_err(|e| {
            let line = line_of("memory.N_d").max(line_of("memory.N_s"));
            ConfigError::at(line, e.to_string())
        })?;
        let plan = config.stage_plan(&problem, &memory);
        plan.validate().map_err(|e| {
            ConfigError::at(line_of("stage.gentry"), e.to_string())
        })?;
        plan.validate_total(config.budget)
            .map_err(|e| ConfigError::at(line_of("stage.split"), e.to_string()))?;
        for driver in &config.drivers {
            let driver_config = config.driver_config(*driver);
            dhs_core::engine::DhsRun::new(
                plan.clone(),
                &problem,
                driver_config,
                memory.clone(),
                config.baselines(&problem),
                0,
            )
            .map_err(|e| ConfigError::at(line_of("driver.mu"), e.to_string()))?;
        }
    }
    Ok(())
}

fn fmt_f64(value: f64) -> String {
    format!("{value:?}")
}

/// Renders a configuration back to the flat key format; `parse_config`
/// round-trips it exactly.
pub fn render_config(config: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut push = |key: &str, value: String| {
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    };

    push(
        "problems",
        config
            .problems
            .iter()
            .map(|(name, dim)| format!("{name}:{dim}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    push(
        "drivers",
        config
            .drivers
            .iter()
            .map(|d| d.label().to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    push(
        "wrappers",
        config
            .wrappers
            .iter()
            .map(|w| w.label().to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    push(
        "seeds",
        config
            .seeds
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    push("budget", config.budget.to_string());
    push("output", config.output.clone());
    push("threshold", fmt_f64(config.threshold));

    macro_rules! emit {
        ($key:literal, $slot:expr, int) => {
            if let Some(v) = $slot {
                push($key, v.to_string());
            }
        };
        ($key:literal, $slot:expr, float) => {
            if let Some(v) = $slot {
                push($key, fmt_f64(v));
            }
        };
    }

    emit!("memory.N_d", config.memory.deep_capacity, int);
    emit!("memory.N_s", config.memory.shallow_capacity, int);
    emit!("memory.N_x", config.memory.extended_capacity, int);
    emit!("memory.d_e", config.memory.elite_depth, int);
    emit!("memory.d_f", config.memory.frequency_depth, int);
    emit!("memory.d_c", config.memory.characteristic_depth, int);
    emit!("memory.d_s", config.memory.spatial_depth, int);
    emit!("memory.d_r", config.memory.recentness_capacity, int);
    emit!("memory.tabu_radius", config.memory.tabu_radius, float);
    emit!("memory.partitions_per_dim", config.memory.partitions_per_dim, int);
    emit!("memory.grid_dim_cap", config.memory.grid_dimension_cap, int);

    if let Some(split) = config.stage.split {
        push(
            "stage.split",
            split
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("/"),
        );
    }
    emit!("stage.gentry", config.stage.gentry_size, int);
    emit!("stage.coverage", config.stage.coverage, float);
    emit!("stage.stagnation_exploratory", config.stage.stagnation_exploratory, int);
    emit!("stage.stagnation_mixed", config.stage.stagnation_mixed, int);
    emit!("stage.restarts_exploratory", config.stage.restarts_exploratory, int);
    emit!("stage.restarts_mixed", config.stage.restarts_mixed, int);
    emit!("stage.restarts_intensive", config.stage.restarts_intensive, int);
    emit!("stage.candidates", config.stage.candidates, int);
    emit!("stage.similarity_tolerance", config.stage.similarity_tolerance, float);
    emit!("stage.agreement", config.stage.agreement, float);
    emit!("stage.burst_iterations", config.stage.burst_iterations, int);

    emit!("operator.radius", config.operator.radius, float);
    emit!("operator.zones", config.operator.zones, int);
    emit!("operator.trials_per_zone", config.operator.trials_per_zone, int);
    emit!("operator.expand_multiplier", config.operator.expand_multiplier, float);
    emit!("operator.condense_multiplier", config.operator.condense_multiplier, float);
    emit!("operator.learning_rate", config.operator.learning_rate, float);

    emit!("driver.mu", config.driver.mu, int);
    emit!("driver.lambda", config.driver.lambda, int);
    if let Some(selection) = config.driver.selection {
        push(
            "driver.selection",
            match selection {
                Selection::Plus => "plus".to_string(),
                Selection::Comma => "comma".to_string(),
            },
        );
    }
    emit!("driver.mutation_probability", config.driver.mutation_probability, float);
    emit!("driver.mutation_sigma", config.driver.mutation_sigma, float);
    emit!("driver.initial_sigma", config.driver.initial_sigma, float);

    out
}
