//! Built-in scenario catalog: one named, ready-to-run configuration per
//! cluster experiment the simulator is meant to reproduce. `run <name>`
//! resolves here before trying the filesystem.

use crate::policy::{FrameworkSpec, Policy};
use crate::resources::ResourceVector;
use crate::scenario::{ClusterSpec, ScenarioConfig};

/// The reference cluster: four agents, 8 CPUs / 16 GB / 32000 MB disk each
/// (a pool of 32 CPUs and 64 GB).
fn cluster() -> ClusterSpec {
    ClusterSpec {
        agents: 4,
        agent_resources: ResourceVector::from_cores(8, 16384, 32000),
    }
}

fn base_config(frameworks: Vec<FrameworkSpec>) -> ScenarioConfig {
    ScenarioConfig {
        cluster: cluster(),
        allocation_interval_ms: 1000,
        master_offer_timeout_ms: None,
        max_time_ms: 7_200_000,
        seed: 0,
        out_dir: "out".into(),
        frameworks,
    }
}

struct FwBuilder {
    spec: FrameworkSpec,
}

fn fw(id: &str, policy: Policy) -> FwBuilder {
    FwBuilder {
        spec: FrameworkSpec {
            id: id.into(),
            role: "default".into(),
            policy,
            refuse_offer_ms: 5_000,
            decision_delay_ms: 0,
            task_demand: ResourceVector::from_cores(1, 1024, 0),
            task_duration_ms: 100_000,
            task_count: 100,
            arrival_interval_ms: 2_000,
            start_time_ms: 0,
            registration_time_ms: 0,
        },
    }
}

impl FwBuilder {
    fn delay_ms(mut self, ms: u64) -> Self {
        self.spec.decision_delay_ms = ms;
        self
    }
}

impl FwBuilder {
    fn refuse_s(mut self, secs: u64) -> Self {
        self.spec.refuse_offer_ms = secs * 1000;
        self
    }
    fn demand(mut self, d: ResourceVector) -> Self {
        self.spec.task_demand = d;
        self
    }
    fn duration_s(mut self, secs: u64) -> Self {
        self.spec.task_duration_ms = secs * 1000;
        self
    }
    fn count(mut self, n: u64) -> Self {
        self.spec.task_count = n;
        self
    }
    fn arrival_s(mut self, secs: u64) -> Self {
        self.spec.arrival_interval_ms = secs * 1000;
        self
    }
    fn start_s(mut self, secs: u64) -> Self {
        self.spec.start_time_ms = secs * 1000;
        self.spec.registration_time_ms = secs * 1000;
        self
    }
    fn build(self) -> FrameworkSpec {
        self.spec
    }
}

fn holding(inner: Policy, hold_s: u64) -> Policy {
    Policy::Holding {
        hold_ms: hold_s * 1000,
        inner: Box::new(inner),
    }
}

/// Two identical first-fit frameworks, the second starting once the first
/// has filled the cluster; both refuse offers for `refuse_s`.
fn two_scylla(refuse_s: u64) -> ScenarioConfig {
    base_config(vec![
        fw("scylla-a", Policy::FirstFit).refuse_s(refuse_s).build(),
        fw("scylla-b", Policy::FirstFit)
            .refuse_s(refuse_s)
            .start_s(60)
            .build(),
    ])
}

/// Greedy Marathon against a Scylla instance with the given policy, refuse
/// setting, and start offset. Marathon's whole queue is visible immediately
/// and it answers offers instantly; Scylla submits a task every two seconds
/// and takes one allocation period to answer an offer, so declined and
/// unused offers sit against its share for a cycle.
fn marathon_vs_scylla(
    scylla_policy: Policy,
    scylla_refuse_s: u64,
    scylla_start_s: u64,
) -> ScenarioConfig {
    base_config(vec![
        fw("marathon", Policy::GreedyAll).arrival_s(0).build(),
        fw("scylla", scylla_policy)
            .refuse_s(scylla_refuse_s)
            .delay_ms(1_000)
            .start_s(scylla_start_s)
            .build(),
    ])
}

/// A first-fit Scylla that fills the cluster, then an offer-holding Aurora
/// joining against it. `task_disk_mb` is the per-task disk footprint for
/// both frameworks; `scylla_refuse_s` is the competitor knob.
fn scylla_vs_aurora(task_disk_mb: u64, scylla_refuse_s: u64) -> ScenarioConfig {
    let demand = ResourceVector::from_cores(1, 2048, task_disk_mb);
    let mut config = base_config(vec![
        fw("scylla", Policy::FirstFit)
            .refuse_s(scylla_refuse_s)
            .demand(demand)
            .duration_s(475)
            .arrival_s(3)
            .build(),
        fw("aurora", holding(Policy::FirstFit, 300))
            .refuse_s(5)
            .demand(demand)
            .duration_s(475)
            .start_s(30)
            .build(),
    ]);
    config.max_time_ms = 28_800_000;
    config
}

/// One active framework plus `idle` task-less frameworks competing for
/// offers. The idle frameworks are registered before the active one, so
/// zero-usage ties favor them the way they favor incumbents.
fn idle_frameworks(idle: usize, idle_refuse_s: u64, active_refuse_s: u64) -> ScenarioConfig {
    let mut frameworks = vec![fw("scylla", Policy::FirstFit)
        .refuse_s(active_refuse_s)
        .start_s(2)
        .build()];
    for k in 0..idle {
        frameworks.push(
            fw(&format!("idle-{k}"), Policy::FirstFit)
                .refuse_s(idle_refuse_s)
                .count(0)
                .build(),
        );
    }
    base_config(frameworks)
}

/// Long-running and short-running task frameworks with configurable
/// arrival intervals; equal total runtime on both sides.
fn long_short(long_arrival_s: u64, short_arrival_s: u64) -> ScenarioConfig {
    base_config(vec![
        fw("scylla-long", Policy::FirstFit)
            .count(50)
            .duration_s(200)
            .arrival_s(long_arrival_s)
            .build(),
        fw("scylla-short", Policy::FirstFit)
            .count(100)
            .duration_s(100)
            .arrival_s(short_arrival_s)
            .build(),
    ])
}

/// `(name, one-line description)` for every built-in scenario.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "scylla-vs-marathon-firstfit",
            "greedy Marathon starves a first-fit Scylla with no offer refusal",
        ),
        (
            "scylla-vs-aurora-holding",
            "offer-holding Aurora starves itself against a running Scylla",
        ),
        ("two-scylla-refuse-0", "two identical Scyllas, no offer refusal"),
        ("two-scylla-refuse-5", "two identical Scyllas, 5 s offer refusal"),
        ("two-scylla-refuse-7", "two identical Scyllas, 7 s offer refusal"),
        ("two-scylla-refuse-10", "two identical Scyllas, 10 s offer refusal"),
        (
            "scylla-binpack-vs-marathon-refuse-3",
            "bin-packing Scylla with 3 s refusal against greedy Marathon",
        ),
        (
            "scylla-binpack-vs-marathon-refuse-5",
            "bin-packing Scylla with 5 s refusal against greedy Marathon",
        ),
        (
            "aurora-hold-smalldisk-refuse-5",
            "Aurora holds big disk-only offers left by 100 MB-disk tasks; Scylla refuses 5 s",
        ),
        (
            "aurora-hold-smalldisk-refuse-20",
            "small-disk tasks with Scylla's refusal raised to 20 s",
        ),
        (
            "aurora-hold-bigdisk-refuse-5",
            "4096 MB-disk tasks leave no idle disk to hold; Scylla refuses 5 s",
        ),
        (
            "aurora-hold-bigdisk-refuse-20",
            "big-disk tasks with Scylla's refusal raised to 20 s",
        ),
        ("idle-frameworks-0", "a single active Scylla, no idle frameworks"),
        ("idle-frameworks-1", "one idle framework competing for offers"),
        ("idle-frameworks-2", "two idle frameworks competing for offers"),
        ("idle-frameworks-3", "three idle frameworks competing for offers"),
        ("idle-frameworks-4", "four idle frameworks competing for offers"),
        ("idle-frameworks-5", "five idle frameworks competing for offers"),
        (
            "idle-refuse-tuned",
            "five idle frameworks refusing 10 s while the active one refuses 2 s",
        ),
        (
            "long-short-arrival-5-5",
            "long and short tasks arriving every 5 s on both sides",
        ),
        (
            "long-short-arrival-5-10",
            "long tasks every 5 s, short tasks every 10 s",
        ),
        (
            "long-short-arrival-10-5",
            "long tasks every 10 s, short tasks every 5 s",
        ),
    ]
}

/// Resolves a built-in scenario by name.
pub fn get(name: &str) -> Option<ScenarioConfig> {
    let config = match name {
        "scylla-vs-marathon-firstfit" => marathon_vs_scylla(Policy::FirstFit, 0, 0),
        "scylla-vs-aurora-holding" => base_config(vec![
            fw("scylla", Policy::FirstFit).refuse_s(5).build(),
            fw("aurora", holding(Policy::FirstFit, 300))
                .refuse_s(5)
                .start_s(30)
                .build(),
        ]),
        "two-scylla-refuse-0" => two_scylla(0),
        "two-scylla-refuse-5" => two_scylla(5),
        "two-scylla-refuse-7" => two_scylla(7),
        "two-scylla-refuse-10" => two_scylla(10),
        "scylla-binpack-vs-marathon-refuse-3" => marathon_vs_scylla(Policy::BinPacking, 3, 10),
        "scylla-binpack-vs-marathon-refuse-5" => marathon_vs_scylla(Policy::BinPacking, 5, 10),
        "aurora-hold-smalldisk-refuse-5" => scylla_vs_aurora(100, 5),
        "aurora-hold-smalldisk-refuse-20" => scylla_vs_aurora(100, 20),
        "aurora-hold-bigdisk-refuse-5" => scylla_vs_aurora(4096, 5),
        "aurora-hold-bigdisk-refuse-20" => scylla_vs_aurora(4096, 20),
        "idle-frameworks-0" => idle_frameworks(0, 5, 5),
        "idle-frameworks-1" => idle_frameworks(1, 5, 5),
        "idle-frameworks-2" => idle_frameworks(2, 5, 5),
        "idle-frameworks-3" => idle_frameworks(3, 5, 5),
        "idle-frameworks-4" => idle_frameworks(4, 5, 5),
        "idle-frameworks-5" => idle_frameworks(5, 5, 5),
        "idle-refuse-tuned" => idle_frameworks(5, 10, 2),
        "long-short-arrival-5-5" => long_short(5, 5),
        "long-short-arrival-5-10" => long_short(5, 10),
        "long-short-arrival-10-5" => long_short(10, 5),
        _ => return None,
    };
    Some(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, serialize, validate};

    #[test]
    fn catalog_has_at_least_eight_entries() {
        assert!(catalog().len() >= 8);
    }

    #[test]
    fn every_name_maps_to_a_valid_round_tripping_config() {
        for (name, _) in catalog() {
            let config = get(name).unwrap_or_else(|| panic!("missing builtin '{name}'"));
            validate(&config).unwrap_or_else(|e| panic!("builtin '{name}' invalid: {e}"));
            let reparsed = parse_scenario(&serialize(&config))
                .unwrap_or_else(|e| panic!("builtin '{name}' does not round-trip: {e}"));
            assert_eq!(reparsed, config, "builtin '{name}' round-trip mismatch");
        }
    }

    #[test]
    fn unknown_name_is_none() {
        assert!(get("no-such-scenario").is_none());
    }
}
