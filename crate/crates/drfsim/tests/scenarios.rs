//! Scenario-level behavior that spans the engine and metrics: workload
//! examples, truncation handling, symmetry properties, and the shape of
//! the shipped scenario catalog.

use drfsim::engine;
use drfsim::metrics;
use drfsim::policy::{FrameworkSpec, Policy};
use drfsim::resources::ResourceVector;
use drfsim::scenario::{ClusterSpec, ScenarioConfig};
use drfsim::builtins;

fn rv(cores: u64, mem: u64, disk: u64) -> ResourceVector {
    ResourceVector::from_cores(cores, mem, disk)
}

fn cluster_4x8() -> ClusterSpec {
    ClusterSpec {
        agents: 4,
        agent_resources: rv(8, 16384, 32000),
    }
}

fn scylla_like(id: &str, count: u64, refuse_ms: u64, start_ms: u64) -> FrameworkSpec {
    FrameworkSpec {
        id: id.into(),
        role: "default".into(),
        policy: Policy::FirstFit,
        refuse_offer_ms: refuse_ms,
        decision_delay_ms: 0,
        task_demand: rv(1, 1024, 0),
        task_duration_ms: 100_000,
        task_count: count,
        arrival_interval_ms: 2_000,
        start_time_ms: start_ms,
        registration_time_ms: start_ms,
    }
}

fn config(frameworks: Vec<FrameworkSpec>) -> ScenarioConfig {
    ScenarioConfig {
        cluster: cluster_4x8(),
        allocation_interval_ms: 1000,
        master_offer_timeout_ms: None,
        max_time_ms: 3_600_000,
        seed: 0,
        out_dir: "out".into(),
        frameworks,
    }
}

/// A lone framework pushing 100 tasks at 2-second intervals through a
/// 32-slot cluster: everything finishes, peak concurrency hits the slot
/// limit, and the makespan respects the pipeline lower bound of
/// ceil(100/32) * 100 s.
#[test]
fn single_framework_pipeline() {
    let cfg = config(vec![scylla_like("solo", 100, 0, 0)]);
    let result = engine::run(&cfg);
    assert!(!result.truncated);
    assert!(result.tasks.iter().all(|t| t.finish.is_some()));

    let tl = metrics::timeline(&result);
    let peak = *tl.counts[0].iter().max().unwrap();
    assert_eq!(peak, 32);

    let makespan = metrics::makespan(&result, "solo").unwrap();
    assert!(!makespan.truncated);
    assert!(
        makespan.seconds >= 400.0,
        "makespan {} below the pipeline bound",
        makespan.seconds
    );
}

#[test]
fn truncated_run_flags_makespan() {
    let mut cfg = config(vec![scylla_like("solo", 5, 0, 0)]);
    cfg.frameworks[0].task_duration_ms = 10_000_000;
    cfg.max_time_ms = 60_000;
    let result = engine::run(&cfg);
    assert!(result.truncated);
    let makespan = metrics::makespan(&result, "solo").unwrap();
    assert!(makespan.truncated);
    // Reported up to the truncation horizon.
    assert_eq!(makespan.seconds, 60.0);
}

/// Two frameworks with identical configurations and start times split the
/// cluster evenly: over the detected window, attainments sum to at most
/// 200% and each stays near the fair line, so neither reduction is
/// meaningfully positive.
#[test]
fn identical_frameworks_split_evenly() {
    for seed in 0..10u64 {
        let mut cfg = config(vec![
            scylla_like("twin-a", 100, 5_000, 0),
            scylla_like("twin-b", 100, 5_000, 0),
        ]);
        cfg.seed = seed;
        let result = engine::run(&cfg);
        let rows = metrics::summarize(&result);
        let a = rows[0].attainment_pct.expect("window exists");
        let b = rows[1].attainment_pct.expect("window exists");
        assert!(a + b <= 200.0 + 1e-9, "seed {seed}: attainments sum to {}", a + b);
        // Alternation jitter only: both stay close to the fair line.
        assert!(a <= 115.0 && b <= 115.0, "seed {seed}: attainments {a:.1}/{b:.1}");
        assert!(a >= 85.0 && b >= 85.0, "seed {seed}: attainments {a:.1}/{b:.1}");
        assert!(rows[0].reduction_pct.unwrap() >= 0.0);
        assert!(rows[1].reduction_pct.unwrap() >= 0.0);
    }
}

/// Adding idle competitors never materially improves the active
/// framework's makespan, and five of them slow it down outright.
#[test]
fn idle_frameworks_never_help() {
    let mean = |name: &str| -> f64 {
        let cfg = builtins::get(name).unwrap();
        let v: Vec<f64> = (0..10u64)
            .map(|seed| {
                let result = engine::run(&cfg.with_seed(seed));
                metrics::makespan(&result, "scylla").unwrap().seconds
            })
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let base = mean("idle-frameworks-0");
    for idle in 1..=5 {
        let m = mean(&format!("idle-frameworks-{idle}"));
        // A percent of phase jitter is possible; real improvement is not.
        assert!(
            m >= base * 0.99,
            "{idle} idles: makespan {m:.1} better than baseline {base:.1}"
        );
    }
    assert!(mean("idle-frameworks-5") > base);
}

/// The catalog's greedy-vs-first-fit scenario carries the documented
/// contest: the reference cluster, a greedy framework with its whole queue,
/// and a first-fit framework with 100 one-CPU/one-GB 100-second tasks.
#[test]
fn marathon_scenario_shape() {
    let cfg = builtins::get("scylla-vs-marathon-firstfit").unwrap();
    assert_eq!(cfg.cluster.agents, 4);
    assert_eq!(cfg.cluster.agent_resources, rv(8, 16384, 32000));
    let marathon = &cfg.frameworks[0];
    assert_eq!(marathon.policy, Policy::GreedyAll);
    assert_eq!(marathon.arrival_interval_ms, 0);
    let scylla = &cfg.frameworks[1];
    assert_eq!(scylla.policy, Policy::FirstFit);
    assert_eq!(scylla.task_demand, rv(1, 1024, 0));
    assert_eq!(scylla.task_duration_ms, 100_000);
    assert_eq!(scylla.task_count, 100);
    assert_eq!(marathon.task_count, 100);
}
