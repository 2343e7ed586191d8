//! Post-processing over simulation results: per-second running-task
//! timelines, the area-based unfairness metric, makespan, and utilization.
//!
//! Counts are sampled at whole-second boundaries; a task launched at second
//! `s` with duration `d` counts in seconds `s..s+d`. Unfairness over a
//! window `[i, j]` is the ratio of the framework's running-task area to the
//! fair line's area, integrated by unit-second rectangles.

use std::io::{self, Write};

use thiserror::Error;

use crate::engine::SimulationResult;
use crate::resources::{ResourceKind, ResourceVector};
use crate::simtime::SimTime;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MetricsError {
    #[error("window start {0} is not before window end {1}")]
    EmptyWindow(u64, u64),
    #[error("framework activity spans do not overlap; no contention window")]
    NoOverlap,
    #[error("fair line is zero; the cluster cannot run this task template")]
    ZeroFairLine,
}

/// Per-second running-task counts per framework, with each framework's fair
/// line (capacity-limited max concurrent tasks over active frameworks).
#[derive(Clone, Debug)]
pub struct Timeline {
    pub frameworks: Vec<String>,
    /// `counts[f][s]` = tasks of framework `f` running at second `s`.
    pub counts: Vec<Vec<u32>>,
    /// Equal split of the cluster's concurrent capacity for framework `f`'s
    /// task template among frameworks that have tasks.
    pub fair_lines: Vec<f64>,
}

impl Timeline {
    pub fn seconds(&self) -> u64 {
        self.counts.first().map(|c| c.len() as u64).unwrap_or(0)
    }

    pub fn framework_index(&self, id: &str) -> Option<usize> {
        self.frameworks.iter().position(|f| f == id)
    }
}

/// How far a framework's running-task area fell short of (or exceeded) its
/// fair line over a window.
#[derive(Clone, Debug, PartialEq)]
pub struct UnfairnessReport {
    pub framework: String,
    pub window: (u64, u64),
    /// Area ratio as a percentage; can exceed 100 when running above fair.
    pub attainment_pct: f64,
    /// `100 - min(100, attainment)`.
    pub reduction_pct: f64,
}

/// Maximum number of template tasks the cluster can run concurrently:
/// tasks cannot span agents, so the per-agent fit count times agent count.
pub fn max_concurrent_tasks(cluster_agents: u64, agent: &ResourceVector, demand: &ResourceVector) -> u64 {
    let mut per_agent = u64::MAX;
    for kind in ResourceKind::ALL {
        let d = demand.get(kind);
        if d == 0 {
            continue;
        }
        per_agent = per_agent.min(agent.get(kind) / d);
    }
    if per_agent == u64::MAX {
        0 // all-zero demand fits nowhere meaningfully
    } else {
        per_agent * cluster_agents
    }
}

/// Builds the per-second timeline from task records. Seconds run from 0
/// through the end of the simulation inclusive.
pub fn timeline(result: &SimulationResult) -> Timeline {
    let seconds = result.end_time.whole_secs() + 1;
    let nfw = result.config.frameworks.len();
    let mut counts = vec![vec![0u32; seconds as usize]; nfw];
    for task in &result.tasks {
        let Some(launch) = task.launch else { continue };
        let finish = task.finish.unwrap_or(result.end_time + 1);
        for s in 0..seconds {
            let instant = SimTime::from_secs(s);
            if launch <= instant && instant < finish {
                counts[task.framework][s as usize] += 1;
            }
        }
    }
    let active = result
        .config
        .frameworks
        .iter()
        .filter(|f| f.task_count > 0)
        .count()
        .max(1) as u64;
    let fair_lines = result
        .config
        .frameworks
        .iter()
        .map(|f| {
            let cap = max_concurrent_tasks(
                result.config.cluster.agents,
                &result.config.cluster.agent_resources,
                &f.task_demand,
            );
            (cap / active) as f64
        })
        .collect();
    Timeline {
        frameworks: result.config.frameworks.iter().map(|f| f.id.clone()).collect(),
        counts,
        fair_lines,
    }
}

/// The area-ratio unfairness over `[i, j)` for one framework.
pub fn unfairness(
    timeline: &Timeline,
    framework: &str,
    window: (u64, u64),
) -> Result<UnfairnessReport, MetricsError> {
    let (i, j) = window;
    if i >= j {
        return Err(MetricsError::EmptyWindow(i, j));
    }
    let f = timeline
        .framework_index(framework)
        .unwrap_or_else(|| panic!("unknown framework '{framework}'"));
    let fair = timeline.fair_lines[f];
    if fair <= 0.0 {
        return Err(MetricsError::ZeroFairLine);
    }
    let counts = &timeline.counts[f];
    let area: u64 = (i..j)
        .map(|s| counts.get(s as usize).copied().unwrap_or(0) as u64)
        .sum();
    let attainment_pct = 100.0 * area as f64 / (fair * (j - i) as f64);
    Ok(UnfairnessReport {
        framework: framework.to_string(),
        window,
        attainment_pct,
        reduction_pct: 100.0 - attainment_pct.min(100.0),
    })
}

/// The contention window: from the first second at which every framework
/// with tasks has launched at least one, to the last second at which every
/// such framework still has pending or running tasks. Ramp-in and ramp-out
/// around the overlap are excluded.
pub fn window_detect(result: &SimulationResult) -> Result<(u64, u64), MetricsError> {
    let seconds = result.end_time.whole_secs();
    let mut start = 0u64;
    let mut end = u64::MAX;
    let mut competing = 0;
    for (f, spec) in result.config.frameworks.iter().enumerate() {
        if spec.task_count == 0 {
            continue;
        }
        competing += 1;
        let tasks: Vec<_> = result.tasks_of(f).collect();
        let first_launch = tasks
            .iter()
            .filter_map(|t| t.launch)
            .min()
            .ok_or(MetricsError::NoOverlap)?;
        // First whole second at which the launch has happened.
        let a = first_launch.as_millis().div_ceil(1000);
        // Last second with pending or running work.
        let mut b = 0u64;
        for s in (0..=seconds).rev() {
            let instant = SimTime::from_secs(s);
            let launched = tasks.iter().filter(|t| t.launch.is_some_and(|l| l <= instant)).count();
            let pending = launched < tasks.len();
            let running = tasks.iter().any(|t| t.is_running_at(instant));
            if pending || running {
                b = s;
                break;
            }
        }
        start = start.max(a);
        end = end.min(b);
    }
    if competing < 2 || start >= end {
        return Err(MetricsError::NoOverlap);
    }
    Ok((start, end))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Makespan {
    pub seconds: f64,
    /// True when the run was truncated with this framework's work unfinished.
    pub truncated: bool,
}

/// Time from a framework's start to its last task completion. `None` when
/// the framework has no tasks.
pub fn makespan(result: &SimulationResult, framework: &str) -> Option<Makespan> {
    let f = result.config.frameworks.iter().position(|s| s.id == framework)?;
    let tasks: Vec<_> = result.tasks_of(f).collect();
    if tasks.is_empty() {
        return None;
    }
    let origin = tasks
        .iter()
        .map(|t| t.arrival)
        .min()
        .unwrap()
        .min(SimTime::from_millis(result.config.frameworks[f].start_time_ms));
    let unfinished = tasks.iter().any(|t| t.finish.is_none());
    let last = tasks
        .iter()
        .filter_map(|t| t.finish)
        .max()
        .map_or(result.end_time, |m| m.max(if unfinished { result.end_time } else { m }));
    Some(Makespan {
        seconds: (last - origin) as f64 / 1000.0,
        truncated: unfinished,
    })
}

/// Cluster utilization of one resource, sampled per second: running demand
/// over cluster total.
pub fn utilization(result: &SimulationResult, kind: ResourceKind) -> Vec<f64> {
    let total = result.config.cluster_total().get(kind);
    let seconds = result.end_time.whole_secs() + 1;
    let mut series = vec![0.0; seconds as usize];
    if total == 0 {
        return series;
    }
    for task in &result.tasks {
        let d = task.demand.get(kind);
        if d == 0 {
            continue;
        }
        let Some(launch) = task.launch else { continue };
        let finish = task.finish.unwrap_or(result.end_time + 1);
        for s in 0..seconds {
            let instant = SimTime::from_secs(s);
            if launch <= instant && instant < finish {
                series[s as usize] += d as f64 / total as f64;
            }
        }
    }
    series
}

/// Mean fraction of each cluster resource used by one framework's running
/// tasks over the whole run.
pub fn framework_mean_utilization(result: &SimulationResult, framework: &str) -> [f64; 3] {
    let Some(f) = result.config.frameworks.iter().position(|s| s.id == framework) else {
        return [0.0; 3];
    };
    let seconds = result.end_time.whole_secs() + 1;
    let total = result.config.cluster_total();
    let mut sums = [0.0f64; 3];
    for task in result.tasks_of(f) {
        let Some(launch) = task.launch else { continue };
        let finish = task.finish.unwrap_or(result.end_time + 1);
        for s in 0..seconds {
            let instant = SimTime::from_secs(s);
            if launch <= instant && instant < finish {
                for (k, kind) in ResourceKind::ALL.iter().enumerate() {
                    if total.get(*kind) > 0 {
                        sums[k] += task.demand.get(*kind) as f64 / total.get(*kind) as f64;
                    }
                }
            }
        }
    }
    sums.map(|s| s / seconds as f64)
}

/// Everything the summary CSV reports for one framework.
#[derive(Clone, Debug)]
pub struct FrameworkSummary {
    pub framework: String,
    pub window: Option<(u64, u64)>,
    pub attainment_pct: Option<f64>,
    pub reduction_pct: Option<f64>,
    pub makespan_s: Option<f64>,
    pub makespan_truncated: bool,
    pub mean_util: [f64; 3],
}

/// Computes the per-framework summary rows for one run: the detected
/// contention window (when one exists), unfairness over it, makespan, and
/// mean utilization.
pub fn summarize(result: &SimulationResult) -> Vec<FrameworkSummary> {
    let tl = timeline(result);
    let window = window_detect(result).ok();
    result
        .config
        .frameworks
        .iter()
        .map(|spec| {
            let (attainment, reduction) = match window {
                Some(w) if spec.task_count > 0 => match unfairness(&tl, &spec.id, w) {
                    Ok(r) => (Some(r.attainment_pct), Some(r.reduction_pct)),
                    Err(_) => (None, None),
                },
                _ => (None, None),
            };
            let ms = makespan(result, &spec.id);
            FrameworkSummary {
                framework: spec.id.clone(),
                window: if spec.task_count > 0 { window } else { None },
                attainment_pct: attainment,
                reduction_pct: reduction,
                makespan_s: ms.map(|m| m.seconds),
                makespan_truncated: ms.map(|m| m.truncated).unwrap_or(false),
                mean_util: framework_mean_utilization(result, &spec.id),
            }
        })
        .collect()
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

/// `second,framework,running_tasks` rows, second-major.
pub fn write_timeline_csv<W: Write>(tl: &Timeline, mut w: W) -> io::Result<()> {
    writeln!(w, "second,framework,running_tasks")?;
    for s in 0..tl.seconds() {
        for (f, name) in tl.frameworks.iter().enumerate() {
            writeln!(w, "{s},{name},{}", tl.counts[f][s as usize])?;
        }
    }
    Ok(())
}

/// One row per framework, empty cells where a quantity is undefined (no
/// tasks, or no contention window).
pub fn write_summary_csv<W: Write>(rows: &[FrameworkSummary], mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "framework,window_start,window_end,attainment_pct,reduction_pct,makespan_s,\
         mean_cpu_util,mean_mem_util,mean_disk_util"
    )?;
    for r in rows {
        let (ws, we) = match r.window {
            Some((i, j)) => (i.to_string(), j.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{:.4},{:.4},{:.4}",
            r.framework,
            ws,
            we,
            fmt_opt(r.attainment_pct, 2),
            fmt_opt(r.reduction_pct, 2),
            fmt_opt(r.makespan_s, 3),
            r.mean_util[0],
            r.mean_util[1],
            r.mean_util[2],
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{FrameworkSpec, Policy};
    use crate::scenario::{ClusterSpec, ScenarioConfig};

    fn rv(cores: u64, mem: u64, disk: u64) -> ResourceVector {
        ResourceVector::from_cores(cores, mem, disk)
    }

    fn base_config(frameworks: Vec<FrameworkSpec>) -> ScenarioConfig {
        ScenarioConfig {
            cluster: ClusterSpec {
                agents: 4,
                agent_resources: rv(8, 16384, 32000),
            },
            allocation_interval_ms: 1000,
            master_offer_timeout_ms: None,
            max_time_ms: 3_600_000,
            seed: 1,
            out_dir: "out".into(),
            frameworks,
        }
    }

    fn fw(id: &str, count: u64) -> FrameworkSpec {
        FrameworkSpec {
            id: id.into(),
            role: "default".into(),
            policy: Policy::BinPacking,
            refuse_offer_ms: 0,
            decision_delay_ms: 0,
            task_demand: rv(1, 1024, 0),
            task_duration_ms: 100_000,
            task_count: count,
            arrival_interval_ms: 0,
            start_time_ms: 0,
            registration_time_ms: 0,
        }
    }

    /// Hand-built result: no engine involved.
    fn synthetic_result(tasks: Vec<TaskSpec>) -> SimulationResult {
        let mut config = base_config(vec![fw("a", 0), fw("b", 0)]);
        let mut records = Vec::new();
        let mut end = SimTime::ZERO;
        let mut counts = [0u64; 2];
        for t in tasks {
            counts[t.fw] += 1;
            let launch = SimTime::from_secs(t.launch);
            let finish = SimTime::from_secs(t.launch + t.duration);
            end = end.max(finish);
            records.push(crate::engine::TaskRecord {
                name: format!("t{}", records.len()),
                framework: t.fw,
                demand: rv(1, 1024, 0),
                duration_ms: t.duration * 1000,
                arrival: SimTime::from_secs(t.arrival),
                launch: Some(launch),
                finish: Some(finish),
                agent: Some(0),
            });
        }
        config.frameworks[0].task_count = counts[0];
        config.frameworks[1].task_count = counts[1];
        SimulationResult {
            config,
            tasks: records,
            end_time: end,
            truncated: false,
            event_log: Vec::new(),
        }
    }

    struct TaskSpec {
        fw: usize,
        arrival: u64,
        launch: u64,
        duration: u64,
    }

    #[test]
    fn timeline_rectangle() {
        let tasks: Vec<TaskSpec> = (0..32)
            .map(|_| TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 100 })
            .collect();
        let result = synthetic_result(tasks);
        let tl = timeline(&result);
        let a = tl.framework_index("a").unwrap();
        for s in 0..100 {
            assert_eq!(tl.counts[a][s], 32);
        }
        assert_eq!(tl.counts[a][100], 0);
    }

    #[test]
    fn timeline_half_open_interval() {
        let result = synthetic_result(vec![TaskSpec { fw: 0, arrival: 0, launch: 10, duration: 5 }]);
        let tl = timeline(&result);
        let a = tl.framework_index("a").unwrap();
        let running: Vec<u64> = (0..tl.seconds())
            .filter(|&s| tl.counts[a][s as usize] > 0)
            .collect();
        assert_eq!(running, vec![10, 11, 12, 13, 14]);
    }

    #[test]
    fn timeline_empty() {
        let result = synthetic_result(vec![]);
        let tl = timeline(&result);
        assert!(tl.counts.iter().all(|c| c.iter().all(|&x| x == 0)));
    }

    #[test]
    fn fair_line_is_capacity_over_active() {
        // 32 concurrent (1,1024,0) tasks fit; two frameworks with tasks.
        let mut result = synthetic_result(vec![
            TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 1 },
            TaskSpec { fw: 1, arrival: 0, launch: 0, duration: 1 },
        ]);
        result.config.frameworks[0].task_count = 1;
        result.config.frameworks[1].task_count = 1;
        let tl = timeline(&result);
        assert_eq!(tl.fair_lines, vec![16.0, 16.0]);
    }

    #[test]
    fn unfairness_exactly_fair() {
        // Constant 16 against fair line 16 over any window.
        let tasks: Vec<TaskSpec> = (0..16)
            .map(|_| TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 100 })
            .chain((0..16).map(|_| TaskSpec { fw: 1, arrival: 0, launch: 0, duration: 100 }))
            .collect();
        let result = synthetic_result(tasks);
        let tl = timeline(&result);
        let r = unfairness(&tl, "a", (10, 90)).unwrap();
        assert!((r.attainment_pct - 100.0).abs() < 1e-9);
        assert_eq!(r.reduction_pct, 0.0);
    }

    #[test]
    fn unfairness_rectangle_arithmetic() {
        // Constant 10 against fair 16: attainment 62.5, reduction 37.5.
        let tasks: Vec<TaskSpec> = (0..10)
            .map(|_| TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 100 })
            .chain((0..16).map(|_| TaskSpec { fw: 1, arrival: 0, launch: 0, duration: 100 }))
            .collect();
        let result = synthetic_result(tasks);
        let tl = timeline(&result);
        let r = unfairness(&tl, "a", (0, 100)).unwrap();
        assert!((r.attainment_pct - 62.5).abs() < 1e-9);
        assert!((r.reduction_pct - 37.5).abs() < 1e-9);
    }

    #[test]
    fn unfairness_total_starvation() {
        let tasks: Vec<TaskSpec> = (0..16)
            .map(|_| TaskSpec { fw: 1, arrival: 0, launch: 0, duration: 100 })
            .collect();
        let mut result = synthetic_result(tasks);
        result.config.frameworks[0].task_count = 5; // has tasks, launched none
        let tl = timeline(&result);
        let r = unfairness(&tl, "a", (0, 100)).unwrap();
        assert_eq!(r.attainment_pct, 0.0);
        assert_eq!(r.reduction_pct, 100.0);
    }

    #[test]
    fn unfairness_window_scale_invariant() {
        let tasks: Vec<TaskSpec> = (0..10)
            .map(|_| TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 100 })
            .chain((0..10).map(|_| TaskSpec { fw: 1, arrival: 0, launch: 0, duration: 100 }))
            .collect();
        let result = synthetic_result(tasks);
        let tl = timeline(&result);
        let narrow = unfairness(&tl, "a", (20, 30)).unwrap();
        let wide = unfairness(&tl, "a", (0, 100)).unwrap();
        assert!((narrow.attainment_pct - wide.attainment_pct).abs() < 1e-9);
    }

    #[test]
    fn unfairness_empty_window() {
        let result = synthetic_result(vec![TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 10 }]);
        let tl = timeline(&result);
        assert_eq!(
            unfairness(&tl, "a", (5, 5)),
            Err(MetricsError::EmptyWindow(5, 5))
        );
    }

    #[test]
    fn window_is_interval_intersection() {
        // a active seconds [0, 400]; b active [50, 500].
        let tasks = vec![
            TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 200 },
            TaskSpec { fw: 0, arrival: 0, launch: 300, duration: 101 },
            TaskSpec { fw: 1, arrival: 50, launch: 50, duration: 200 },
            TaskSpec { fw: 1, arrival: 50, launch: 400, duration: 101 },
        ];
        let result = synthetic_result(tasks);
        let (i, j) = window_detect(&result).unwrap();
        assert_eq!((i, j), (50, 400));
    }

    #[test]
    fn window_identical_spans() {
        let tasks = vec![
            TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 100 },
            TaskSpec { fw: 1, arrival: 0, launch: 0, duration: 100 },
        ];
        let result = synthetic_result(tasks);
        // Both active [0, 99]: full span.
        assert_eq!(window_detect(&result).unwrap(), (0, 99));
    }

    #[test]
    fn window_disjoint_spans() {
        let tasks = vec![
            TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 100 },
            TaskSpec { fw: 1, arrival: 200, launch: 200, duration: 100 },
        ];
        let result = synthetic_result(tasks);
        assert_eq!(window_detect(&result), Err(MetricsError::NoOverlap));
    }

    #[test]
    fn makespan_single_task() {
        let result = synthetic_result(vec![TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 100 }]);
        let m = makespan(&result, "a").unwrap();
        assert_eq!(m.seconds, 100.0);
        assert!(!m.truncated);
        assert!(makespan(&result, "b").is_none());
    }

    #[test]
    fn utilization_ratios() {
        // 16 of 32 cpus busy.
        let tasks: Vec<TaskSpec> = (0..16)
            .map(|_| TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 10 })
            .collect();
        let result = synthetic_result(tasks);
        let cpu = utilization(&result, ResourceKind::Cpu);
        assert!((cpu[5] - 0.5).abs() < 1e-9);
        assert_eq!(*cpu.last().unwrap(), 0.0);
        let disk = utilization(&result, ResourceKind::Disk);
        assert_eq!(disk[5], 0.0);
    }

    #[test]
    fn csv_shapes() {
        let tasks = vec![
            TaskSpec { fw: 0, arrival: 0, launch: 0, duration: 2 },
            TaskSpec { fw: 1, arrival: 0, launch: 1, duration: 2 },
        ];
        let result = synthetic_result(tasks);
        let tl = timeline(&result);
        let mut buf = Vec::new();
        write_timeline_csv(&tl, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("second,framework,running_tasks"));
        assert_eq!(lines.next(), Some("0,a,1"));
        assert_eq!(lines.next(), Some("0,b,0"));

        let rows = summarize(&result);
        let mut buf = Vec::new();
        write_summary_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "framework,window_start,window_end,attainment_pct,reduction_pct,makespan_s,"
        ));
        assert_eq!(text.lines().count(), 3);
    }
}
