//! Idle frameworks slow down an active one.
//!
//! Task-less frameworks sit at a dominant share of zero, so the allocator
//! keeps offering them everything first. Each decline costs the active
//! framework an allocation cycle per agent. Raising the idle refusal to
//! 10 s while lowering the active framework's to 2 s recovers the makespan.
//!
//!     cargo run --release --example idle_frameworks

use drfsim::{builtins, engine, metrics};

fn mean_makespan(name: &str) -> f64 {
    let config = builtins::get(name).expect("builtin");
    let values: Vec<f64> = (0..10)
        .map(|seed| {
            let result = engine::run(&config.with_seed(seed));
            metrics::makespan(&result, "scylla").expect("active framework").seconds
        })
        .collect();
    values.iter().sum::<f64>() / values.len() as f64
}

fn main() {
    println!("mean makespan of 100 tasks over 10 seeds:\n");
    let base = mean_makespan("idle-frameworks-0");
    for idle in 0..=5 {
        let name = format!("idle-frameworks-{idle}");
        let m = mean_makespan(&name);
        println!("  {idle} idle frameworks: {m:6.0} s  ({:.2}x)", m / base);
    }
    let tuned = mean_makespan("idle-refuse-tuned");
    println!("\n  idle refuse 10 s + active refuse 2 s: {tuned:6.0} s  ({:.2}x)", tuned / base);
}
