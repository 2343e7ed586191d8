//! Command-line front end: run, list, and validate scenarios.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use drfsim::runner::{self, RunOptions};
use drfsim::scenario::{self, ScenarioError};
use drfsim::simtime::SimTime;
use drfsim::{builtins, metrics};

#[derive(Parser)]
#[command(name = "drfsim", version, about = "Mesos-style DRF cluster scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a scenario file, writing CSV results.
    Run {
        /// Built-in scenario name or path to a scenario file.
        scenario: String,
        /// Seed for a single run (repeatable).
        #[arg(long)]
        seed: Vec<u64>,
        /// Seed set: comma-separated values and/or `a..b` ranges, e.g. `0..10`.
        #[arg(long)]
        seeds: Option<String>,
        /// Output directory (defaults to the scenario's `out_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario's max simulated time, in seconds.
        #[arg(long)]
        max_time: Option<f64>,
        /// Also write a per-seed event log for debugging.
        #[arg(long)]
        event_log: bool,
    },
    /// List the built-in scenario catalog.
    List,
    /// Parse and validate a scenario file without running it.
    Validate { file: PathBuf },
}

fn parse_seed_spec(spec: &str) -> Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| format!("bad seed range '{part}'"))?;
            let b: u64 = b.trim().parse().map_err(|_| format!("bad seed range '{part}'"))?;
            if a >= b {
                return Err(format!("empty seed range '{part}'"));
            }
            seeds.extend(a..b);
        } else {
            seeds.push(part.parse().map_err(|_| format!("bad seed '{part}'"))?);
        }
    }
    Ok(seeds)
}

fn exit_code_for(err: &ScenarioError) -> ExitCode {
    match err {
        ScenarioError::Io { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, description) in builtins::catalog() {
                println!("{name:40} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { file } => {
            let arg = file.display().to_string();
            match runner::load_scenario(&arg) {
                Ok((name, config)) => {
                    println!(
                        "{name}: ok ({} agents, {} frameworks, max time {} s)",
                        config.cluster.agents,
                        config.frameworks.len(),
                        SimTime::from_millis(config.max_time_ms)
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
        Command::Run {
            scenario,
            seed,
            seeds,
            out,
            max_time,
            event_log,
        } => {
            let mut all_seeds = seed;
            if let Some(spec) = seeds {
                match parse_seed_spec(&spec) {
                    Ok(more) => all_seeds.extend(more),
                    Err(msg) => {
                        eprintln!("error: {msg}");
                        return ExitCode::from(1);
                    }
                }
            }
            let (name, config) = match runner::load_scenario(&scenario) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code_for(&e);
                }
            };
            if let Err(e) = scenario::validate(&config) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            let options = RunOptions {
                out_dir: out,
                max_time_ms: max_time.map(|s| SimTime::from_secs_f64(s).as_millis()),
                event_log,
            };
            match runner::run_scenario(&name, &config, &all_seeds, &options) {
                Ok(report) => {
                    println!(
                        "{}: {} seed(s) -> {}",
                        report.scenario,
                        report.seeds.len(),
                        report.out_dir.display()
                    );
                    print_report(&report);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
    }
}

fn print_report(report: &runner::RunReport) {
    // Mean attainment/reduction/makespan per framework across seeds.
    if report.per_seed.is_empty() {
        return;
    }
    let n = report.per_seed[0].len();
    for f in 0..n {
        let name = &report.per_seed[0][f].framework;
        let mean = |pick: fn(&metrics::FrameworkSummary) -> Option<f64>| {
            let vals: Vec<f64> = report.per_seed.iter().filter_map(|rows| pick(&rows[f])).collect();
            if vals.is_empty() {
                None
            } else {
                Some(vals.iter().sum::<f64>() / vals.len() as f64)
            }
        };
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "  {name}: attainment {}%, reduction {}%, makespan {} s",
            fmt(mean(|r| r.attainment_pct)),
            fmt(mean(|r| r.reduction_pct)),
            fmt(mean(|r| r.makespan_s)),
        );
    }
}
