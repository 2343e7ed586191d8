//! The scenario file format: a flat, commented, key-value text schema with
//! repeated `[framework]` blocks. Exactly one schema, versioned; unknown
//! keys are errors. See `docs/scenario-schema.md` for the field list.

use std::fmt::Write as _;

use thiserror::Error;

use crate::policy::{FrameworkSpec, Policy};
use crate::resources::{ResourceKind, ResourceVector};
use crate::simtime::MILLIS_PER_SEC;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("unknown scenario '{0}': not a built-in name and no such file")]
    UnknownScenario(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// The machines: how many identical agents and what each one has.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterSpec {
    pub agents: u64,
    pub agent_resources: ResourceVector,
}

impl ClusterSpec {
    pub fn total(&self) -> ResourceVector {
        let mut total = ResourceVector::ZERO;
        for _ in 0..self.agents {
            total = total.add(&self.agent_resources);
        }
        total
    }
}

/// A fully validated simulation scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub cluster: ClusterSpec,
    /// How often agents advertise and the master allocates.
    pub allocation_interval_ms: u64,
    /// Master-side offer timeout; `None` lets frameworks hold forever.
    pub master_offer_timeout_ms: Option<u64>,
    pub max_time_ms: u64,
    pub seed: u64,
    pub out_dir: String,
    pub frameworks: Vec<FrameworkSpec>,
}

impl ScenarioConfig {
    pub fn cluster_total(&self) -> ResourceVector {
        self.cluster.total()
    }

    pub fn with_seed(&self, seed: u64) -> ScenarioConfig {
        let mut c = self.clone();
        c.seed = seed;
        c
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Default)]
struct RawBlock {
    entries: Vec<(usize, String, String)>, // line, key, value
}

impl RawBlock {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(line, _, v)| (*line, v.as_str()))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_u64(line: usize, key: &str, value: &str) -> Result<u64, ScenarioError> {
    value.parse::<u64>().map_err(|_| ScenarioError::Parse {
        line,
        message: format!("key '{key}' expects a non-negative integer, got '{value}'"),
    })
}

/// Seconds value, possibly fractional, converted to whole milliseconds.
fn parse_secs_ms(line: usize, key: &str, value: &str) -> Result<u64, ScenarioError> {
    let secs: f64 = value.parse().map_err(|_| ScenarioError::Parse {
        line,
        message: format!("key '{key}' expects seconds as a number, got '{value}'"),
    })?;
    if !secs.is_finite() || secs < 0.0 {
        return Err(ScenarioError::Parse {
            line,
            message: format!("key '{key}' expects non-negative seconds, got '{value}'"),
        });
    }
    Ok((secs * MILLIS_PER_SEC as f64).round() as u64)
}

fn parse_cores_millis(line: usize, key: &str, value: &str) -> Result<u64, ScenarioError> {
    let cores: f64 = value.parse().map_err(|_| ScenarioError::Parse {
        line,
        message: format!("key '{key}' expects a core count, got '{value}'"),
    })?;
    if !cores.is_finite() || cores < 0.0 {
        return Err(ScenarioError::Parse {
            line,
            message: format!("key '{key}' expects a non-negative core count, got '{value}'"),
        });
    }
    Ok((cores * 1000.0).round() as u64)
}

fn parse_base_policy(line: usize, key: &str, value: &str) -> Result<Policy, ScenarioError> {
    match value {
        "first-fit" => Ok(Policy::FirstFit),
        "bin-packing" => Ok(Policy::BinPacking),
        "one-task-per-cycle" => Ok(Policy::OneTaskPerCycle),
        "greedy-all" => Ok(Policy::GreedyAll),
        other => Err(ScenarioError::Parse {
            line,
            message: format!(
                "key '{key}' expects one of first-fit, bin-packing, one-task-per-cycle, \
                 greedy-all, got '{other}'"
            ),
        }),
    }
}

const CLUSTER_KEYS: &[&str] = &["agents", "agent_cpu", "agent_mem_mb", "agent_disk_mb"];
const MASTER_KEYS: &[&str] = &[
    "allocation_interval_s",
    "offer_timeout_s",
    "max_time_s",
    "seed",
    "out_dir",
];
const FRAMEWORK_KEYS: &[&str] = &[
    "id",
    "role",
    "policy",
    "hold_s",
    "inner_policy",
    "refuse_offer_s",
    "decision_delay_s",
    "task_cpu",
    "task_mem_mb",
    "task_disk_mb",
    "task_duration_s",
    "task_count",
    "arrival_interval_s",
    "start_time_s",
    "registration_time_s",
];

/// Parses and validates scenario text. Unknown sections and keys are
/// errors, as are duplicate keys within a block.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let mut version: Option<(usize, u64)> = None;
    let mut cluster = RawBlock::default();
    let mut master = RawBlock::default();
    let mut frameworks: Vec<RawBlock> = Vec::new();

    enum Section {
        Top,
        Cluster,
        Master,
        Framework,
    }
    let mut section = Section::Top;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name.trim() {
                "cluster" => Section::Cluster,
                "master" => Section::Master,
                "framework" => {
                    frameworks.push(RawBlock::default());
                    Section::Framework
                }
                other => {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("unknown section '[{other}]'"),
                    })
                }
            };
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!("expected 'key = value' or '[section]', got '{line}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let (block, allowed) = match section {
            Section::Top => {
                if key == "version" {
                    if version.is_some() {
                        return Err(ScenarioError::Parse {
                            line: line_no,
                            message: "duplicate key 'version'".into(),
                        });
                    }
                    version = Some((line_no, parse_u64(line_no, key, value)?));
                    continue;
                }
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: format!("key '{key}' before any section (only 'version' may appear here)"),
                });
            }
            Section::Cluster => (&mut cluster, CLUSTER_KEYS),
            Section::Master => (&mut master, MASTER_KEYS),
            Section::Framework => (frameworks.last_mut().unwrap(), FRAMEWORK_KEYS),
        };
        if !allowed.contains(&key) {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!("unknown key '{key}'"),
            });
        }
        if block.get(key).is_some() {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!("duplicate key '{key}'"),
            });
        }
        block.entries.push((line_no, key.to_string(), value.to_string()));
    }

    let Some((vline, v)) = version else {
        return Err(ScenarioError::Parse {
            line: 1,
            message: "missing 'version = 1' header".into(),
        });
    };
    if v != SCHEMA_VERSION {
        return Err(ScenarioError::Parse {
            line: vline,
            message: format!("unsupported schema version {v}; this build reads version {SCHEMA_VERSION}"),
        });
    }

    let require = |block: &RawBlock, section: &str, key: &str| -> Result<(usize, String), ScenarioError> {
        block
            .get(key)
            .map(|(l, v)| (l, v.to_string()))
            .ok_or_else(|| ScenarioError::Parse {
                line: 0,
                message: format!("missing key '{key}' in [{section}]"),
            })
            .map_err(|e| match e {
                ScenarioError::Parse { message, .. } => ScenarioError::Parse { line: 0, message },
                other => other,
            })
    };

    // [cluster]
    let (l, v) = require(&cluster, "cluster", "agents")?;
    let agents = parse_u64(l, "agents", &v)?;
    let (l, v) = require(&cluster, "cluster", "agent_cpu")?;
    let cpu = parse_cores_millis(l, "agent_cpu", &v)?;
    let (l, v) = require(&cluster, "cluster", "agent_mem_mb")?;
    let mem = parse_u64(l, "agent_mem_mb", &v)?;
    let (l, v) = require(&cluster, "cluster", "agent_disk_mb")?;
    let disk = parse_u64(l, "agent_disk_mb", &v)?;

    // [master]
    let (l, v) = require(&master, "master", "allocation_interval_s")?;
    let allocation_interval_ms = parse_secs_ms(l, "allocation_interval_s", &v)?;
    let master_offer_timeout_ms = match master.get("offer_timeout_s") {
        Some((l, v)) => Some(parse_secs_ms(l, "offer_timeout_s", v)?),
        None => None,
    };
    let (l, v) = require(&master, "master", "max_time_s")?;
    let max_time_ms = parse_secs_ms(l, "max_time_s", &v)?;
    let seed = match master.get("seed") {
        Some((l, v)) => parse_u64(l, "seed", v)?,
        None => 0,
    };
    let out_dir = master
        .get("out_dir")
        .map(|(_, v)| v.to_string())
        .unwrap_or_else(|| "out".to_string());

    // [framework] blocks
    let mut specs = Vec::with_capacity(frameworks.len());
    for block in &frameworks {
        let (_, id) = require(block, "framework", "id")?;
        let role = block
            .get("role")
            .map(|(_, v)| v.to_string())
            .unwrap_or_else(|| "default".to_string());
        let (pl, pv) = require(block, "framework", "policy")?;
        let policy = if pv == "holding" {
            let (hl, hv) = require(block, "framework", "hold_s")?;
            let (il, iv) = require(block, "framework", "inner_policy")?;
            Policy::Holding {
                hold_ms: parse_secs_ms(hl, "hold_s", &hv)?,
                inner: Box::new(parse_base_policy(il, "inner_policy", &iv)?),
            }
        } else {
            let policy = parse_base_policy(pl, "policy", &pv)?;
            for key in ["hold_s", "inner_policy"] {
                if let Some((l, _)) = block.get(key) {
                    return Err(ScenarioError::Parse {
                        line: l,
                        message: format!("key '{key}' is only valid with policy = holding"),
                    });
                }
            }
            policy
        };
        let (l, v) = require(block, "framework", "refuse_offer_s")?;
        let refuse_offer_ms = parse_secs_ms(l, "refuse_offer_s", &v)?;
        let decision_delay_ms = match block.get("decision_delay_s") {
            Some((l, v)) => parse_secs_ms(l, "decision_delay_s", v)?,
            None => 0,
        };
        let (l, v) = require(block, "framework", "task_cpu")?;
        let task_cpu = parse_cores_millis(l, "task_cpu", &v)?;
        let (l, v) = require(block, "framework", "task_mem_mb")?;
        let task_mem = parse_u64(l, "task_mem_mb", &v)?;
        let (l, v) = require(block, "framework", "task_disk_mb")?;
        let task_disk = parse_u64(l, "task_disk_mb", &v)?;
        let (l, v) = require(block, "framework", "task_duration_s")?;
        let task_duration_ms = parse_secs_ms(l, "task_duration_s", &v)?;
        let (l, v) = require(block, "framework", "task_count")?;
        let task_count = parse_u64(l, "task_count", &v)?;
        let (l, v) = require(block, "framework", "arrival_interval_s")?;
        let arrival_interval_ms = parse_secs_ms(l, "arrival_interval_s", &v)?;
        let (l, v) = require(block, "framework", "start_time_s")?;
        let start_time_ms = parse_secs_ms(l, "start_time_s", &v)?;
        let registration_time_ms = match block.get("registration_time_s") {
            Some((l, v)) => parse_secs_ms(l, "registration_time_s", v)?,
            None => start_time_ms,
        };
        specs.push(FrameworkSpec {
            id,
            role,
            policy,
            refuse_offer_ms,
            decision_delay_ms,
            task_demand: ResourceVector::new(task_cpu, task_mem, task_disk),
            task_duration_ms,
            task_count,
            arrival_interval_ms,
            start_time_ms,
            registration_time_ms,
        });
    }

    let config = ScenarioConfig {
        cluster: ClusterSpec {
            agents,
            agent_resources: ResourceVector::new(cpu, mem, disk),
        },
        allocation_interval_ms,
        master_offer_timeout_ms,
        max_time_ms,
        seed,
        out_dir,
        frameworks: specs,
    };
    validate(&config)?;
    Ok(config)
}

/// Checks every scenario invariant, naming the violated one.
pub fn validate(config: &ScenarioConfig) -> Result<(), ScenarioError> {
    let fail = |message: String| Err(ScenarioError::Validation(message));

    if config.cluster.agents == 0 {
        return fail("cluster must have at least one agent".into());
    }
    if config.frameworks.is_empty() {
        return fail("scenario must define at least one framework".into());
    }
    if config.allocation_interval_ms == 0 {
        return fail("allocation_interval_s must be positive".into());
    }
    if config.max_time_ms == 0 {
        return fail("max_time_s must be positive".into());
    }
    if config.master_offer_timeout_ms == Some(0) {
        return fail("offer_timeout_s must be positive when present".into());
    }
    let mut seen = std::collections::HashSet::new();
    for fw in &config.frameworks {
        if fw.id.is_empty()
            || !fw
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return fail(format!(
                "framework id '{}' must be non-empty and use only [A-Za-z0-9._-]",
                fw.id
            ));
        }
        if !seen.insert(fw.id.clone()) {
            return fail(format!("duplicate framework id '{}'", fw.id));
        }
        if fw.task_count > 0 && fw.task_demand.is_zero() {
            return fail(format!(
                "framework '{}' has tasks but an all-zero task demand",
                fw.id
            ));
        }
        if fw.registration_time_ms > fw.start_time_ms {
            return fail(format!(
                "framework '{}' registers after its start time",
                fw.id
            ));
        }
        if let Policy::Holding { inner, .. } = &fw.policy {
            if matches!(**inner, Policy::Holding { .. }) {
                return fail(format!("framework '{}' nests holding policies", fw.id));
            }
        }
        if fw.task_count > 0 {
            for kind in ResourceKind::ALL {
                if fw.task_demand.get(kind) > 0 && config.cluster.agent_resources.get(kind) == 0 {
                    return fail(format!(
                        "framework '{}' tasks need {} but agents have none",
                        fw.id, kind
                    ));
                }
            }
        }
    }
    Ok(())
}

fn fmt_secs(ms: u64) -> String {
    if ms.is_multiple_of(MILLIS_PER_SEC) {
        format!("{}", ms / MILLIS_PER_SEC)
    } else {
        format!("{:.3}", ms as f64 / MILLIS_PER_SEC as f64)
    }
}

fn fmt_cores(millis: u64) -> String {
    if millis.is_multiple_of(1000) {
        format!("{}", millis / 1000)
    } else {
        format!("{:.3}", millis as f64 / 1000.0)
    }
}

/// Renders a config in canonical schema text. `parse_scenario` of the output
/// reproduces the config exactly.
pub fn serialize(config: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "version = {SCHEMA_VERSION}");
    let _ = writeln!(s);
    let _ = writeln!(s, "[cluster]");
    let _ = writeln!(s, "agents = {}", config.cluster.agents);
    let _ = writeln!(s, "agent_cpu = {}", fmt_cores(config.cluster.agent_resources.cpu_millis()));
    let _ = writeln!(s, "agent_mem_mb = {}", config.cluster.agent_resources.mem_mb());
    let _ = writeln!(s, "agent_disk_mb = {}", config.cluster.agent_resources.disk_mb());
    let _ = writeln!(s);
    let _ = writeln!(s, "[master]");
    let _ = writeln!(s, "allocation_interval_s = {}", fmt_secs(config.allocation_interval_ms));
    if let Some(t) = config.master_offer_timeout_ms {
        let _ = writeln!(s, "offer_timeout_s = {}", fmt_secs(t));
    }
    let _ = writeln!(s, "max_time_s = {}", fmt_secs(config.max_time_ms));
    let _ = writeln!(s, "seed = {}", config.seed);
    let _ = writeln!(s, "out_dir = {}", config.out_dir);
    for fw in &config.frameworks {
        let _ = writeln!(s);
        let _ = writeln!(s, "[framework]");
        let _ = writeln!(s, "id = {}", fw.id);
        let _ = writeln!(s, "role = {}", fw.role);
        match &fw.policy {
            Policy::Holding { hold_ms, inner } => {
                let _ = writeln!(s, "policy = holding");
                let _ = writeln!(s, "hold_s = {}", fmt_secs(*hold_ms));
                let _ = writeln!(s, "inner_policy = {}", inner.name());
            }
            other => {
                let _ = writeln!(s, "policy = {}", other.name());
            }
        }
        let _ = writeln!(s, "refuse_offer_s = {}", fmt_secs(fw.refuse_offer_ms));
        let _ = writeln!(s, "decision_delay_s = {}", fmt_secs(fw.decision_delay_ms));
        let _ = writeln!(s, "task_cpu = {}", fmt_cores(fw.task_demand.cpu_millis()));
        let _ = writeln!(s, "task_mem_mb = {}", fw.task_demand.mem_mb());
        let _ = writeln!(s, "task_disk_mb = {}", fw.task_demand.disk_mb());
        let _ = writeln!(s, "task_duration_s = {}", fmt_secs(fw.task_duration_ms));
        let _ = writeln!(s, "task_count = {}", fw.task_count);
        let _ = writeln!(s, "arrival_interval_s = {}", fmt_secs(fw.arrival_interval_ms));
        let _ = writeln!(s, "start_time_s = {}", fmt_secs(fw.start_time_ms));
        let _ = writeln!(s, "registration_time_s = {}", fmt_secs(fw.registration_time_ms));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_text() -> String {
        "\
version = 1

[cluster]
agents = 4
agent_cpu = 8
agent_mem_mb = 16384
agent_disk_mb = 32000

[master]
allocation_interval_s = 1
max_time_s = 3600

[framework]
id = scylla-a
policy = first-fit
refuse_offer_s = 5
task_cpu = 1
task_mem_mb = 1024
task_disk_mb = 0
task_duration_s = 100
task_count = 100
arrival_interval_s = 2
start_time_s = 0
"
        .to_string()
    }

    #[test]
    fn parses_minimal_scenario() {
        let config = parse_scenario(&minimal_text()).unwrap();
        assert_eq!(config.cluster.agents, 4);
        assert_eq!(
            config.cluster.agent_resources,
            ResourceVector::from_cores(8, 16384, 32000)
        );
        assert_eq!(config.allocation_interval_ms, 1000);
        assert_eq!(config.master_offer_timeout_ms, None);
        assert_eq!(config.seed, 0);
        assert_eq!(config.out_dir, "out");
        let fw = &config.frameworks[0];
        assert_eq!(fw.id, "scylla-a");
        assert_eq!(fw.policy, Policy::FirstFit);
        assert_eq!(fw.refuse_offer_ms, 5000);
        assert_eq!(fw.registration_time_ms, 0);
        assert_eq!(config.cluster_total(), ResourceVector::from_cores(32, 65536, 128000));
    }

    #[test]
    fn comments_and_fractions() {
        let text = minimal_text().replace("task_cpu = 1", "task_cpu = 0.5 # half a core");
        let config = parse_scenario(&text).unwrap();
        assert_eq!(config.frameworks[0].task_demand.cpu_millis(), 500);
    }

    #[test]
    fn unknown_key_is_an_error_with_line() {
        let text = minimal_text() + "unexpected = 1\n";
        let err = parse_scenario(&text).unwrap_err();
        match err {
            ScenarioError::Parse { line, message } => {
                assert!(message.contains("unknown key 'unexpected'"));
                assert!(line > 0);
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn duplicate_key_is_an_error() {
        let text = minimal_text() + "task_count = 5\n";
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Parse { .. })
        ));
    }

    #[test]
    fn missing_version_is_an_error() {
        let text = minimal_text().replace("version = 1\n", "");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Parse { .. })
        ));
    }

    #[test]
    fn zero_agents_fails_validation() {
        let text = minimal_text().replace("agents = 4", "agents = 0");
        match parse_scenario(&text) {
            Err(ScenarioError::Validation(msg)) => assert!(msg.contains("at least one agent")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn zero_offer_timeout_fails_validation() {
        let text = minimal_text().replace(
            "allocation_interval_s = 1",
            "allocation_interval_s = 1\noffer_timeout_s = 0",
        );
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Validation(_))
        ));
    }

    #[test]
    fn negative_refuse_is_an_error() {
        let text = minimal_text().replace("refuse_offer_s = 5", "refuse_offer_s = -1");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Parse { .. })
        ));
    }

    #[test]
    fn holding_requires_hold_and_inner() {
        let text = minimal_text().replace("policy = first-fit", "policy = holding");
        assert!(parse_scenario(&text).is_err());
        let text = minimal_text().replace(
            "policy = first-fit",
            "policy = holding\nhold_s = 300\ninner_policy = first-fit",
        );
        let config = parse_scenario(&text).unwrap();
        assert_eq!(
            config.frameworks[0].policy,
            Policy::Holding {
                hold_ms: 300_000,
                inner: Box::new(Policy::FirstFit)
            }
        );
    }

    #[test]
    fn hold_keys_rejected_outside_holding() {
        let text = minimal_text().replace("policy = first-fit", "policy = first-fit\nhold_s = 300");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Parse { .. })
        ));
    }

    #[test]
    fn task_axis_unbacked_by_agents_fails() {
        let text = minimal_text().replace("task_disk_mb = 0", "task_disk_mb = 100");
        let text = text.replace("agent_disk_mb = 32000", "agent_disk_mb = 0");
        match parse_scenario(&text) {
            Err(ScenarioError::Validation(msg)) => assert!(msg.contains("disk")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_identity() {
        let mut config = parse_scenario(&minimal_text()).unwrap();
        config.master_offer_timeout_ms = Some(60_000);
        config.frameworks.push(FrameworkSpec {
            id: "aurora".into(),
            role: "default".into(),
            policy: Policy::Holding {
                hold_ms: 300_000,
                inner: Box::new(Policy::BinPacking),
            },
            refuse_offer_ms: 5_500,
            decision_delay_ms: 250,
            task_demand: ResourceVector::new(1500, 2048, 100),
            task_duration_ms: 100_000,
            task_count: 50,
            arrival_interval_ms: 0,
            start_time_ms: 60_000,
            registration_time_ms: 30_000,
        });
        let text = serialize(&config);
        let reparsed = parse_scenario(&text).unwrap();
        assert_eq!(reparsed, config);
    }
}
