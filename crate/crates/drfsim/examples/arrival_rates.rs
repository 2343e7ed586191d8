//! Task arrival rates against long-running competitors.
//!
//! A framework of 100-second tasks shares the cluster with one running
//! 200-second tasks. Long tasks block resources until they finish, so the
//! short framework's fairness hinges on how fast it feeds its own queue.
//!
//!     cargo run --release --example arrival_rates

use drfsim::{builtins, engine, metrics};

fn main() {
    println!("short-task framework's reduction over 10 seeds:\n");
    for (name, label) in [
        ("long-short-arrival-5-5", "long every 5 s, short every 5 s"),
        ("long-short-arrival-5-10", "long every 5 s, short every 10 s"),
        ("long-short-arrival-10-5", "long every 10 s, short every 5 s"),
    ] {
        let config = builtins::get(name).expect("builtin");
        let values: Vec<f64> = (0..10)
            .map(|seed| {
                let result = engine::run(&config.with_seed(seed));
                metrics::summarize(&result)
                    .into_iter()
                    .find(|r| r.framework == "scylla-short")
                    .and_then(|r| r.reduction_pct)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        println!("  {label:34} {mean:5.1}%");
    }
    println!("\nSlowing the short framework down starves it further; speeding it up");
    println!("lets it claim freed slots before the long framework re-blocks them.");
}
