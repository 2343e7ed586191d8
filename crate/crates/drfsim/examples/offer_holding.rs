//! Offer holding and the disk-footprint effect.
//!
//! An Aurora-style framework holds every offer for five minutes before
//! deciding. With small-disk tasks the cluster is full of idle disk, Aurora
//! hoards it, and its inflated dominant share starves it. Larger per-task
//! disk leaves nothing to hoard; raising the competitor's refusal period
//! helps further.
//!
//!     cargo run --release --example offer_holding

use drfsim::{builtins, engine, metrics};

fn main() {
    println!("aurora's mean fair-share reduction over 10 seeds:\n");
    for name in [
        "aurora-hold-smalldisk-refuse-5",
        "aurora-hold-smalldisk-refuse-20",
        "aurora-hold-bigdisk-refuse-5",
        "aurora-hold-bigdisk-refuse-20",
    ] {
        let config = builtins::get(name).expect("builtin");
        let values: Vec<f64> = (0..10)
            .map(|seed| {
                let result = engine::run(&config.with_seed(seed));
                metrics::summarize(&result)
                    .into_iter()
                    .find(|r| r.framework == "aurora")
                    .and_then(|r| r.reduction_pct)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        println!("  {name:34} {mean:5.1}%");
    }

    // Show the poisoned dominant share directly on one run.
    let config = builtins::get("aurora-hold-smalldisk-refuse-5").unwrap();
    let result = engine::run(&config);
    let held = result.event_log.iter().find_map(|e| match e {
        drfsim::engine::LogEvent::OfferHeld { t, resources, .. }
            if resources.cpu_millis() == 0 && resources.disk_mb() > 0 =>
        {
            Some((*t, *resources))
        }
        _ => None,
    });
    if let Some((t, resources)) = held {
        println!("\nfirst disk-only offer held by aurora at t={t}: {resources}");
    }
}
