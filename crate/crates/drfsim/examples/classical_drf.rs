//! Classical demand-vector DRF by progressive filling.
//!
//! Two users with different per-task demands share a 9-CPU / 18 GB pool;
//! each ends up with a dominant share of 2/3.
//!
//!     cargo run --example classical_drf

use drfsim::allocator::{classical_drf_allocate, DemandVector, DEFAULT_MAX_GRANTS};
use drfsim::ResourceVector;

fn main() {
    let total = ResourceVector::from_cores(9, 18432, 0);
    let demands = vec![
        DemandVector {
            owner: "user-a".into(),
            demand: ResourceVector::from_cores(1, 4096, 0),
        },
        DemandVector {
            owner: "user-b".into(),
            demand: ResourceVector::from_cores(3, 1024, 0),
        },
    ];
    println!("total {total}");
    for d in &demands {
        println!("  {} wants multiples of {}", d.owner, d.demand);
    }

    let allocation = classical_drf_allocate(total, &demands, DEFAULT_MAX_GRANTS);
    println!();
    for d in &demands {
        let n = allocation[&d.owner];
        let mut usage = ResourceVector::ZERO;
        for _ in 0..n {
            usage = usage.add(&d.demand);
        }
        let share = usage.dominant_share(&total.add(&ResourceVector::new(0, 0, 1)));
        // disk is unused here; give it a nonzero total only for display
        let share = share.unwrap();
        println!(
            "  {} -> n={} usage {} dominant {:.1}% ({})",
            d.owner,
            n,
            usage,
            share.value * 100.0,
            share.kind
        );
    }
}
