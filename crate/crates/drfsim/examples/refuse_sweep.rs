//! Sweeping the refuse-offer period for two identical frameworks.
//!
//! The second framework starts a minute into the first one's run; its mean
//! fair-share reduction shows how the refusal period smooths the handoff.
//!
//!     cargo run --release --example refuse_sweep

use drfsim::{builtins, engine, metrics};

fn main() {
    println!("later framework's reduction across 10 seeds:\n");
    println!("{:>8}  {:>8}  {:>8}", "refuse", "mean", "max");
    for refuse in [0u32, 5, 7, 10] {
        let name = format!("two-scylla-refuse-{refuse}");
        let config = builtins::get(&name).expect("builtin");
        let values: Vec<f64> = (0..10)
            .map(|seed| {
                let result = engine::run(&config.with_seed(seed));
                metrics::summarize(&result)
                    .into_iter()
                    .find(|r| r.framework == "scylla-b")
                    .and_then(|r| r.reduction_pct)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("{refuse:>7}s  {mean:7.2}%  {max:7.2}%");
    }
    println!("\nFive seconds already captures the benefit; longer periods change little.");
}
