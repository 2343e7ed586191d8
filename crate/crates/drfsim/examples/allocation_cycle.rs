//! One allocation cycle by hand: dominant-share sorting, offer filters,
//! and usage updates mid-cycle.
//!
//!     cargo run --example allocation_cycle

use drfsim::allocator::{AgentId, AllocationState};
use drfsim::{ResourceVector, SimTime};

fn main() {
    let total = ResourceVector::from_cores(16, 32768, 64000);
    let mut state = AllocationState::new(total, 42);

    let a = state.add_framework("framework-a", "default");
    let b = state.add_framework("framework-b", "default");
    state.register(a, SimTime::ZERO);
    state.register(b, SimTime::ZERO);

    // B already uses half the cluster's cpu.
    state.charge(b, &ResourceVector::from_cores(8, 16384, 0));
    println!("usage: a={} b={}", state.usage_of(a), state.usage_of(b));
    let order: Vec<&str> = state
        .sort_frameworks("default")
        .into_iter()
        .map(|fw| state.framework_name(fw))
        .collect();
    println!("drf order (ascending dominant share): {order:?}");

    // B declined agent-1 recently, so it is filtered there for 5 seconds.
    let now = SimTime::from_secs(100);
    state.add_filter(b, AgentId(1), 5_000, now);
    println!("filters: {:?}", state.filter_entries());

    let offers = vec![
        (AgentId(0), ResourceVector::from_cores(4, 8192, 16000)),
        (AgentId(1), ResourceVector::from_cores(4, 8192, 16000)),
    ];
    let out = state.allocation_cycle(&offers, now);
    for assignment in &out {
        match assignment.framework {
            Some(fw) => println!(
                "agent-{} {} -> {}",
                assignment.agent.0,
                assignment.resources,
                state.framework_name(fw)
            ),
            None => println!(
                "agent-{} {} -> unassigned (everyone filtered)",
                assignment.agent.0, assignment.resources
            ),
        }
    }
    // Each assignment charged the assignee immediately, so the second
    // agent's sort saw the first agent's allocation.
    println!("usage after cycle: a={} b={}", state.usage_of(a), state.usage_of(b));

    state.expire_filters(SimTime::from_secs(105));
    println!("filters after expiry at t=105: {:?}", state.filter_entries());
}
