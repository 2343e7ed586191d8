//! Deterministic replay and the event log.
//!
//! Runs a small contended scenario twice with the same seed and once with a
//! different one, prints the head of the log, and demonstrates that a run
//! is reproducible down to the last event.
//!
//!     cargo run --example event_log

use drfsim::{builtins, engine};

fn main() {
    let mut config = builtins::get("two-scylla-refuse-5").expect("builtin");
    for fw in &mut config.frameworks {
        fw.task_count = 8;
    }

    let first = engine::run(&config);
    let again = engine::run(&config);
    assert_eq!(first.event_log, again.event_log);
    println!(
        "same seed: {} events, bit-identical replay",
        first.event_log.len()
    );

    let other = engine::run(&config.with_seed(1));
    println!(
        "seed 1: {} events, diverges where the agent shuffle differs",
        other.event_log.len()
    );

    println!("\nfirst 20 events of seed 0:");
    for event in first.event_log.iter().take(20) {
        println!("  {event}");
    }
    println!("  ...");
    println!(
        "simulation ended at t={} ({} tasks finished)",
        first.end_time,
        first.tasks.iter().filter(|t| t.finish.is_some()).count()
    );
}
