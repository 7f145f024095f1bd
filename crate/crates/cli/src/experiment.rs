//! Experiment execution: the (problem x driver x wrapper x seed) matrix,
//! per-run trace files, and the summary table.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use dhs_core::drivers::DriverKind;
use dhs_core::engine;
use dhs_core::problems::benchmark;
use dhs_core::report::{RunReport, WrapperKind};

use crate::config::ExperimentConfig;
use crate::tracefile::{format_value, write_trace};

#[derive(Debug)]
pub enum ExperimentError {
    Run(String),
    Io(std::io::Error),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Run(message) => write!(f, "run failed: {message}"),
            ExperimentError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<std::io::Error> for ExperimentError {
    fn from(e: std::io::Error) -> Self {
        ExperimentError::Io(e)
    }
}

pub const SUMMARY_HEADER: &str =
    "problem,dimension,driver,wrapper,seeds,best,median,worst,median_evals_to_threshold,restarts";

/// Aggregated statistics of one (problem, driver, wrapper) cell over its
/// seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub dimension: usize,
    pub driver: DriverKind,
    pub wrapper: WrapperKind,
    pub seeds: usize,
    pub best: f64,
    pub median: f64,
    pub worst: f64,
    /// Lower median over seeds, absent when most seeds never reached the
    /// threshold.
    pub median_evals_to_threshold: Option<u64>,
    pub restarts: u32,
}

impl SummaryRow {
    pub fn render(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.problem,
            self.dimension,
            self.driver.label(),
            self.wrapper.label(),
            self.seeds,
            format_value(self.best),
            format_value(self.median),
            format_value(self.worst),
            self.median_evals_to_threshold
                .map_or_else(|| "na".to_string(), |v| v.to_string()),
            self.restarts,
        )
    }
}

/// Builds a summary row from the final values and threshold hits of one
/// matrix cell.
pub fn summarize(
    problem: &str,
    dimension: usize,
    driver: DriverKind,
    wrapper: WrapperKind,
    finals: &[f64],
    to_threshold: &[Option<u64>],
    restarts: u32,
) -> SummaryRow {
    assert!(!finals.is_empty());
    let mut sorted = finals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    // lower median with unreached runs sorting last
    let mut hits = to_threshold.to_vec();
    hits.sort_by_key(|h| h.map_or(u64::MAX, |v| v));
    let median_evals_to_threshold = hits[(hits.len() - 1) / 2];
    SummaryRow {
        problem: problem.to_string(),
        dimension,
        driver,
        wrapper,
        seeds: finals.len(),
        best: sorted[0],
        median,
        worst: sorted[sorted.len() - 1],
        median_evals_to_threshold,
        restarts,
    }
}

pub struct ExperimentResult {
    pub reports: Vec<RunReport>,
    pub summary: Vec<SummaryRow>,
}

/// Executes the full matrix in deterministic order: problems, then drivers,
/// then wrappers, then seeds.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let mut reports = Vec::new();
    let mut summary = Vec::new();
    for (name, dimension) in &config.problems {
        let problem =
            benchmark(name, *dimension).map_err(|e| ExperimentError::Run(e.to_string()))?;
        let memory = config.memory_config(&problem);
        let plan = config.stage_plan(&problem, &memory);
        let baselines = config.baselines(&problem);
        for driver in &config.drivers {
            let driver_config = config.driver_config(*driver);
            for wrapper in &config.wrappers {
                let mut finals = Vec::with_capacity(config.seeds.len());
                let mut hits = Vec::with_capacity(config.seeds.len());
                let mut restarts = 0u32;
                for &seed in &config.seeds {
                    let report = match wrapper {
                        WrapperKind::Dhs => engine::run(
                            &plan,
                            &problem,
                            &driver_config,
                            &memory,
                            &baselines,
                            seed,
                        ),
                        WrapperKind::Plain => engine::run_plain(
                            &problem,
                            &driver_config,
                            &memory,
                            &baselines,
                            config.budget,
                            seed,
                        ),
                    }
                    .map_err(|e| ExperimentError::Run(e.to_string()))?;
                    finals.push(report.best.value);
                    hits.push(report.evaluations_to_threshold(config.threshold));
                    restarts += report.restarts.total();
                    reports.push(report);
                }
                summary.push(summarize(
                    name, *dimension, *driver, *wrapper, &finals, &hits, restarts,
                ));
            }
        }
    }
    Ok(ExperimentResult { reports, summary })
}

pub fn trace_file_name(report: &RunReport) -> String {
    format!(
        "{}_{}_{}_{}_seed{}.csv",
        report.problem_name,
        report.dimension,
        report.driver.label(),
        report.wrapper.label(),
        report.seed
    )
}

pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.render());
        out.push('\n');
    }
    out
}

/// Writes one trace CSV per run plus `summary.csv`; returns the paths.
pub fn write_outputs(
    result: &ExperimentResult,
    directory: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(directory)?;
    let mut paths = Vec::with_capacity(result.reports.len() + 1);
    for report in &result.reports {
        let path = directory.join(trace_file_name(report));
        write_trace(report, &path)?;
        paths.push(path);
    }
    let summary_path = directory.join("summary.csv");
    fs::write(&summary_path, render_summary(&result.summary))?;
    paths.push(summary_path);
    Ok(paths)
}
