use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dhs_cli::config::{parse_config, ExperimentConfig};
use dhs_cli::experiment::{run_experiment, write_outputs};
use dhs_core::problems::benchmark_registry;

/// Exit code for configuration errors.
const EXIT_CONFIG: u8 = 2;
/// Exit code for runtime errors.
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dhs",
    about = "Deep heuristic search benchmark runner",
    long_about = "Runs seeded experiment matrices (problems x drivers x {plain, dhs} x seeds)\n\
                  over standard continuous benchmarks and writes trace and summary CSVs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment matrix described by a config file.
    Run {
        config: PathBuf,
        /// Override a config key, e.g. --set budget=10000 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Parse and validate a config file without running anything.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the available benchmark problems.
    ListBenchmarks,
}

/// Joins the config file with the output-directory environment override and
/// any --set overrides; later assignments win.
fn load_config(path: &PathBuf, overrides: &[String]) -> Result<ExperimentConfig, (u8, String)> {
    let mut text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_RUNTIME, format!("cannot read {}: {e}", path.display())))?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    if let Ok(dir) = std::env::var("DHS_OUTPUT_DIR") {
        text.push_str(&format!("output = {dir}\n"));
    }
    for entry in overrides {
        let Some((key, value)) = entry.split_once('=') else {
            return Err((
                EXIT_CONFIG,
                format!("--set expects KEY=VALUE, got `{entry}`"),
            ));
        };
        text.push_str(&format!("{} = {}\n", key.trim(), value.trim()));
    }
    parse_config(&text).map_err(|e| (EXIT_CONFIG, format!("config error: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, set } => load_config(&config, &set).and_then(|config| {
            let result =
                run_experiment(&config).map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
            let directory = PathBuf::from(&config.output);
            let paths = write_outputs(&result, &directory)
                .map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
            println!(
                "{} runs -> {} files under {}",
                result.reports.len(),
                paths.len(),
                directory.display()
            );
            println!("{}", dhs_cli::experiment::SUMMARY_HEADER);
            for row in &result.summary {
                println!("{}", row.render());
            }
            Ok(())
        }),
        Command::Validate { config, set } => load_config(&config, &set).map(|config| {
            let runs = config.problems.len()
                * config.drivers.len()
                * config.wrappers.len()
                * config.seeds.len();
            println!(
                "config ok: {} problems x {} drivers x {} wrappers x {} seeds = {runs} runs, budget {}",
                config.problems.len(),
                config.drivers.len(),
                config.wrappers.len(),
                config.seeds.len(),
                config.budget
            );
        }),
        Command::ListBenchmarks => {
            println!("{:<12} {:<22} optimum", "name", "bounds");
            for spec in benchmark_registry() {
                let bounds = format!("[{}, {}]^n", spec.bounds.0, spec.bounds.1);
                println!("{:<12} {bounds:<22} 0", spec.name);
            }
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
