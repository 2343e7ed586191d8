//! Second-level scheduling policies packing a task queue into one offer.
//!
//!     cargo run --example packing_policies

use drfsim::policy::{pack_bin_packing, pack_first_fit, pack_one_task, Policy};
use drfsim::{ResourceVector, SimTime};

fn main() {
    let offer = ResourceVector::from_cores(8, 16384, 32000);
    let mut queue = vec![ResourceVector::from_cores(1, 1024, 0); 10];
    println!("offer {offer}, queue of 10 x {}", queue[0]);
    println!("  first-fit          takes {:?}", pack_first_fit(&queue, &offer));
    println!("  bin-packing        takes {:?}", pack_bin_packing(&queue, &offer));
    println!("  one-task-per-cycle takes {:?}", pack_one_task(&queue, &offer));

    // Mixed demands: first-fit skips what does not fit the residual;
    // bin-packing prefers tasks with the smallest dominant footprint.
    queue[0] = ResourceVector::from_cores(6, 2048, 0);
    queue[1] = ResourceVector::from_cores(4, 1024, 0);
    println!("\nwith queue[0]=(6cpu,2048mb) and queue[1]=(4cpu,1024mb):");
    println!("  first-fit          takes {:?}", pack_first_fit(&queue, &offer));
    println!("  bin-packing        takes {:?}", pack_bin_packing(&queue, &offer));

    // The holding policy keeps an offer before letting its inner policy
    // decide; greedy-all packs like bin-packing but never backs off.
    let holding = Policy::Holding {
        hold_ms: 300_000,
        inner: Box::new(Policy::FirstFit),
    };
    let now = SimTime::from_secs(10);
    println!("\nholding(first-fit, 300s) first response: {:?}", holding.respond(&queue, &offer, now));
    println!(
        "holding at release: {:?}",
        holding.respond_at_release(&queue, &offer, SimTime::from_secs(310))
    );
    println!(
        "greedy-all effective refuse with 5s configured: {} ms",
        Policy::GreedyAll.effective_refuse_ms(5_000)
    );
}
