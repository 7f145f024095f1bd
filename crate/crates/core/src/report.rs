//! Run reporting: the best-value trace, stage and mode instrumentation,
//! and the final [`RunReport`] of a seeded experiment.

use crate::drivers::DriverKind;
use crate::memory::MemorySnapshot;
use crate::operators::OperationMode;
use crate::problems::Solution;

/// Which pipeline produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrapperKind {
    /// The driver alone in normal mode; memories record but do not steer.
    Plain,
    /// The full five-stage deep-search pipeline.
    Dhs,
}

impl WrapperKind {
    pub fn label(&self) -> &'static str {
        match self {
            WrapperKind::Plain => "plain",
            WrapperKind::Dhs => "dhs",
        }
    }
}

/// Search stage a trace row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageTag {
    Initial,
    Exploratory,
    Mixed,
    Intensive,
    Final,
    /// Rows of a plain (unstaged) run.
    Plain,
}

impl StageTag {
    pub fn label(&self) -> &'static str {
        match self {
            StageTag::Initial => "initial",
            StageTag::Exploratory => "exploratory",
            StageTag::Mixed => "mixed",
            StageTag::Intensive => "intensive",
            StageTag::Final => "final",
            StageTag::Plain => "plain",
        }
    }

    /// The five pipeline stages in execution order.
    pub const CANONICAL: [StageTag; 5] = [
        StageTag::Initial,
        StageTag::Exploratory,
        StageTag::Mixed,
        StageTag::Intensive,
        StageTag::Final,
    ];
}

/// One trace row: the incumbent best after `evaluation` evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub evaluation: u64,
    pub best_value: f64,
    pub stage: StageTag,
}

/// A burst inlaid into the mixed stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurstKind {
    Intensify,
    Diversify,
}

/// One operator-pace decision, logged per driver step or burst iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeEvent {
    pub stage: StageTag,
    pub mode: OperationMode,
    pub burst: Option<BurstKind>,
}

/// Start of a burst, with the distance from the burst's first point to the
/// solution that triggered it.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstEvent {
    pub kind: BurstKind,
    pub evaluation: u64,
    pub start_distance: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RestartCounts {
    pub exploratory: u32,
    pub mixed: u32,
    pub intensive: u32,
}

impl RestartCounts {
    pub fn total(&self) -> u32 {
        self.exploratory + self.mixed + self.intensive
    }
}

/// Incremental trace of a run: improvement rows plus one row per stage
/// boundary, with the incumbent best value always non-increasing.
#[derive(Debug, Clone)]
pub struct RunTrace {
    rows: Vec<TraceRow>,
    best: Option<Solution>,
    stage: StageTag,
}

impl RunTrace {
    pub fn new(stage: StageTag) -> Self {
        Self {
            rows: Vec::new(),
            best: None,
            stage,
        }
    }

    pub fn stage(&self) -> StageTag {
        self.stage
    }

    /// Enters a stage, emitting a boundary row carrying the incumbent best.
    /// Before any evaluation exists the boundary is implicit in the first
    /// improvement row.
    pub fn enter_stage(&mut self, stage: StageTag, evaluation: u64) {
        self.stage = stage;
        if let Some(best) = &self.best {
            self.rows.push(TraceRow {
                evaluation,
                best_value: best.value,
                stage,
            });
        }
    }

    /// Observes an evaluated solution; records a row if it improves the
    /// incumbent best.
    pub fn observe(&mut self, evaluation: u64, solution: &Solution) {
        let improved = self.best.as_ref().is_none_or(|b| solution.value < b.value);
        if improved {
            self.best = Some(solution.clone());
            self.rows.push(TraceRow {
                evaluation,
                best_value: solution.value,
                stage: self.stage,
            });
        }
    }

    pub fn best(&self) -> Option<&Solution> {
        self.best.as_ref()
    }

    pub fn best_value(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.value)
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn into_parts(self) -> (Vec<TraceRow>, Option<Solution>) {
        (self.rows, self.best)
    }
}

/// Complete, reproducible record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub problem_name: String,
    pub dimension: usize,
    pub driver: DriverKind,
    pub wrapper: WrapperKind,
    pub seed: u64,
    pub total_evaluations: u64,
    pub best: Solution,
    pub trace: Vec<TraceRow>,
    /// Evaluation count at entry into each stage, in execution order.
    pub stage_boundaries: Vec<(StageTag, u64)>,
    pub restarts: RestartCounts,
    pub mode_log: Vec<ModeEvent>,
    pub bursts: Vec<BurstEvent>,
    pub snapshot: MemorySnapshot,
}

impl RunReport {
    /// Evaluation index at which the best value first reached `threshold`,
    /// if it ever did.
    pub fn evaluations_to_threshold(&self, threshold: f64) -> Option<u64> {
        self.trace
            .iter()
            .find(|row| row.best_value <= threshold)
            .map(|row| row.evaluation)
    }
}
