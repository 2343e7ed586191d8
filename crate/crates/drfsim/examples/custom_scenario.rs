//! Authoring a scenario in code, round-tripping it through the text
//! format, and running a seed sweep with CSV output.
//!
//!     cargo run --example custom_scenario

use drfsim::policy::{FrameworkSpec, Policy};
use drfsim::runner::{run_scenario, RunOptions};
use drfsim::scenario::{parse_scenario, serialize, ClusterSpec, ScenarioConfig};
use drfsim::ResourceVector;

fn main() {
    let config = ScenarioConfig {
        cluster: ClusterSpec {
            agents: 2,
            agent_resources: ResourceVector::from_cores(4, 8192, 16000),
        },
        allocation_interval_ms: 1000,
        master_offer_timeout_ms: Some(60_000),
        max_time_ms: 900_000,
        seed: 0,
        out_dir: "out/custom".into(),
        frameworks: vec![
            FrameworkSpec {
                id: "batch".into(),
                role: "default".into(),
                policy: Policy::BinPacking,
                refuse_offer_ms: 5_000,
                decision_delay_ms: 0,
                task_demand: ResourceVector::from_cores(1, 1024, 0),
                task_duration_ms: 30_000,
                task_count: 20,
                arrival_interval_ms: 2_000,
                start_time_ms: 0,
                registration_time_ms: 0,
            },
            FrameworkSpec {
                id: "service".into(),
                role: "default".into(),
                policy: Policy::Holding {
                    hold_ms: 120_000,
                    inner: Box::new(Policy::FirstFit),
                },
                refuse_offer_ms: 5_000,
                decision_delay_ms: 0,
                task_demand: ResourceVector::from_cores(2, 2048, 500),
                task_duration_ms: 60_000,
                task_count: 6,
                arrival_interval_ms: 0,
                start_time_ms: 10_000,
                registration_time_ms: 10_000,
            },
        ],
    };

    // The text form is what `drfsim run <file>` consumes.
    let text = serialize(&config);
    println!("--- scenario file ---\n{text}");
    assert_eq!(parse_scenario(&text).unwrap(), config);

    let report = run_scenario(
        "custom",
        &config,
        &[0, 1, 2],
        &RunOptions {
            event_log: true,
            ..Default::default()
        },
    )
    .expect("run");
    println!("--- wrote {} files to {} ---", report.files.len(), report.out_dir.display());
    for rows in &report.per_seed {
        for r in rows {
            println!(
                "  seed row: {} makespan {:?} attainment {:?}",
                r.framework, r.makespan_s, r.attainment_pct
            );
        }
    }
}
