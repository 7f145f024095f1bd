//! Experiment harness around the deep-heuristic-search library: flat-key
//! configuration, seeded run matrices, and machine-readable CSV reports.

pub mod config;
pub mod experiment;
pub mod tracefile;

pub use config::{parse_config, render_config, ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, write_outputs, ExperimentError, ExperimentResult, SummaryRow};
pub use tracefile::{parse_trace, render_trace, write_trace};
