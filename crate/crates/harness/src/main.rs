use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpns_harness::{config, experiments, fit, init_workers, inspect, HarnessError};

/// Experiment driver for the lpns Littlewood–Paley / Navier–Stokes laboratory.
#[derive(Parser)]
#[command(name = "lpns-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Override a config key, e.g. `--set solver.dt=0.01`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print the norms of a saved LPNS field as JSON.
    Check {
        checkpoint: PathBuf,
        #[arg(long, default_value_t = lpns::monitor::DEFAULT_GAMMA)]
        gamma: f64,
        #[arg(long, default_value_t = lpns::grid::DEFAULT_DEALIAS_FRACTION)]
        dealias_fraction: f64,
    },
    /// Fit empirical constants from experiment CSV files.
    FitConstants {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    init_workers()?;
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = config::load(&config, &overrides)?;
            let summary = experiments::run_experiment(&cfg)?;
            for v in &summary.invariant_violations {
                eprintln!("invariant violation: {v}");
            }
            if summary.blow_ups > 0 {
                eprintln!("{} run(s) stopped on suspected blow-up", summary.blow_ups);
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(summary.exit_code())
        }
        Command::Check {
            checkpoint,
            gamma,
            dealias_fraction,
        } => {
            let s = inspect::inspect_checkpoint(&checkpoint, gamma, dealias_fraction)?;
            println!("{}", serde_json::to_string_pretty(&s)?);
            Ok(0)
        }
        Command::FitConstants { csv } => {
            let r = fit::fit_constants(&csv)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as a blow-up
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lpns-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
