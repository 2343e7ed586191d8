//! Dominant-share arithmetic on a four-agent cluster.
//!
//! Walks the bookkeeping of a framework that fills all CPU and memory with
//! 100 MB-disk tasks, then shows how a competitor holding the freed
//! disk-only offers ends up with a 97.81% dominant share without running a
//! single task.
//!
//!     cargo run --example dominant_shares

use drfsim::{ResourceKind, ResourceVector};

fn main() {
    // 4 agents x (8 cpu, 16384 mb, 32000 mb)
    let total = ResourceVector::from_cores(32, 65536, 128000);
    println!("cluster total: {total}");

    // Framework A runs 32 tasks of (1 cpu, 2048 mb, 100 mb).
    let task = ResourceVector::from_cores(1, 2048, 100);
    let mut usage = ResourceVector::ZERO;
    for _ in 0..32 {
        usage = usage.add(&task);
    }
    let fractions = usage.fractions_of(&total).unwrap();
    println!("\nframework A runs 32 x {task}:");
    for (kind, fr) in ResourceKind::ALL.iter().zip(fractions) {
        println!("  {kind:4} {:.2}%", fr * 100.0);
    }
    let share = usage.dominant_share(&total).unwrap();
    println!("  dominant share {:.2}% ({})", share.value * 100.0, share.kind);

    // Each agent still advertises its unused disk: (0, 0, 31200).
    let junk = ResourceVector::new(0, 0, 31200);
    println!("\neach agent still offers {junk}");

    // Framework B holds all four disk-only offers, then A finishes 4 tasks
    // and B holds the freed disk too.
    let mut held = ResourceVector::ZERO;
    for _ in 0..4 {
        held = held.add(&junk);
    }
    held = held.add(&ResourceVector::new(0, 0, 400));
    let share = held.dominant_share(&total).unwrap();
    println!(
        "framework B holds {held}: dominant share {:.2}% ({})",
        share.value * 100.0,
        share.kind
    );

    // A, now at 28 running tasks, sorts ahead of B despite running tasks.
    let a_usage = ResourceVector::from_cores(28, 57344, 2800);
    let a_share = a_usage.dominant_share(&total).unwrap();
    println!(
        "framework A at 28 tasks: dominant share {:.2}% ({}) -- lower than B, \
         so A receives the freed offers first",
        a_share.value * 100.0,
        a_share.kind
    );
}
