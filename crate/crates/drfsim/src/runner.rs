//! Runs one scenario over one or many seeds and writes CSV results: a
//! timeline and summary file per seed plus a cross-seed summary. Seeds run
//! in parallel, one engine each; files are written only after every run
//! completes, so output is deterministic per (scenario, seed set).

use std::fs;
use std::path::{Path, PathBuf};

use crate::builtins;
use crate::engine;
use crate::metrics::{self, FrameworkSummary};
use crate::scenario::{parse_scenario, ScenarioConfig, ScenarioError};

/// Overrides applied on top of a scenario's own settings.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub max_time_ms: Option<u64>,
    /// Also write a newline-delimited event log per seed.
    pub event_log: bool,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub scenario: String,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<Vec<FrameworkSummary>>,
}

/// Resolves a scenario argument: a built-in name first, otherwise a file
/// path to parse.
pub fn load_scenario(arg: &str) -> Result<(String, ScenarioConfig), ScenarioError> {
    if let Some(config) = builtins::get(arg) {
        return Ok((arg.to_string(), config));
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(ScenarioError::UnknownScenario(arg.to_string()));
    }
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: arg.to_string(),
        source,
    })?;
    let config = parse_scenario(&text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    Ok((name, config))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), ScenarioError> {
    fs::write(path, contents).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn stat_line(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let sum: f64 = values.iter().sum();
    let mean = sum / values.len() as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some((mean, min, max))
}

fn cross_seed_csv(config: &ScenarioConfig, per_seed: &[Vec<FrameworkSummary>]) -> String {
    let mut out = String::from(
        "framework,runs,attainment_mean,attainment_min,attainment_max,\
         reduction_mean,reduction_min,reduction_max,\
         makespan_mean,makespan_min,makespan_max\n",
    );
    for (f, spec) in config.frameworks.iter().enumerate() {
        let collect = |pick: fn(&FrameworkSummary) -> Option<f64>| -> Vec<f64> {
            per_seed.iter().filter_map(|rows| pick(&rows[f])).collect()
        };
        let att = collect(|r| r.attainment_pct);
        let red = collect(|r| r.reduction_pct);
        let mk = collect(|r| r.makespan_s);
        let fmt3 = |stats: Option<(f64, f64, f64)>| match stats {
            Some((mean, min, max)) => format!("{mean:.2},{min:.2},{max:.2}"),
            None => ",,".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            spec.id,
            per_seed.len(),
            fmt3(stat_line(&att)),
            fmt3(stat_line(&red)),
            fmt3(stat_line(&mk)),
        ));
    }
    out
}

/// Runs `config` once per seed (an empty list defaults to seed 0) and
/// writes `timeline-seed<k>.csv` and `summary-seed<k>.csv` per seed plus
/// `cross-seed-summary.csv`.
pub fn run_scenario(
    name: &str,
    config: &ScenarioConfig,
    seeds: &[u64],
    options: &RunOptions,
) -> Result<RunReport, ScenarioError> {
    let seeds: Vec<u64> = if seeds.is_empty() { vec![0] } else { seeds.to_vec() };
    let mut base = config.clone();
    if let Some(max) = options.max_time_ms {
        base.max_time_ms = max;
    }
    let out_dir = options
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&base.out_dir));

    let results: Vec<engine::SimulationResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let cfg = base.with_seed(seed);
                scope.spawn(move || engine::run(&cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("seed run")).collect()
    });

    fs::create_dir_all(&out_dir).map_err(|source| ScenarioError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    let mut files = Vec::new();
    let mut per_seed = Vec::new();
    for (seed, result) in seeds.iter().zip(&results) {
        let tl = metrics::timeline(result);
        let mut buf = Vec::new();
        metrics::write_timeline_csv(&tl, &mut buf).expect("in-memory write");
        let path = out_dir.join(format!("timeline-seed{seed}.csv"));
        write_file(&path, &buf)?;
        files.push(path);

        let rows = metrics::summarize(result);
        let mut buf = Vec::new();
        metrics::write_summary_csv(&rows, &mut buf).expect("in-memory write");
        let path = out_dir.join(format!("summary-seed{seed}.csv"));
        write_file(&path, &buf)?;
        files.push(path);
        per_seed.push(rows);

        if options.event_log {
            let path = out_dir.join(format!("events-seed{seed}.log"));
            write_file(&path, result.dump_event_log().as_bytes())?;
            files.push(path);
        }
    }

    let path = out_dir.join("cross-seed-summary.csv");
    write_file(&path, cross_seed_csv(&base, &per_seed).as_bytes())?;
    files.push(path);

    Ok(RunReport {
        scenario: name.to_string(),
        out_dir,
        files,
        seeds,
        per_seed,
    })
}
