//! The second level of scheduling: per-framework policies that map queued
//! tasks onto offered resources, plus the framework attributes (refuse
//! seconds, holding period, task template, arrival rate) that govern how a
//! framework interacts with the allocation module.

use crate::resources::ResourceVector;
use crate::simtime::SimTime;

/// A framework's task-to-offer mapping policy.
///
/// `GreedyAll` packs like `BinPacking` but additionally forces the
/// framework's refuse-offer attribute to zero (consume every offer
/// immediately, never back off). `Holding` keeps each offer for
/// `hold_ms` before applying its inner policy to the then-current queue;
/// held resources count toward the framework's usage the whole time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    FirstFit,
    BinPacking,
    OneTaskPerCycle,
    GreedyAll,
    Holding { hold_ms: u64, inner: Box<Policy> },
}

/// A framework's decision about one offer. `Accept` carries indices into
/// the visible queue passed to [`Policy::respond`], in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Response {
    Accept(Vec<usize>),
    Decline,
    Hold { until: SimTime },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::FirstFit => "first-fit",
            Policy::BinPacking => "bin-packing",
            Policy::OneTaskPerCycle => "one-task-per-cycle",
            Policy::GreedyAll => "greedy-all",
            Policy::Holding { .. } => "holding",
        }
    }

    /// Decision on first receipt of an offer. `queue` is the visible task
    /// queue's demands in FIFO order.
    pub fn respond(&self, queue: &[ResourceVector], offer: &ResourceVector, now: SimTime) -> Response {
        match self {
            Policy::FirstFit => accept_or_decline(pack_first_fit(queue, offer)),
            Policy::BinPacking | Policy::GreedyAll => {
                accept_or_decline(pack_bin_packing(queue, offer))
            }
            Policy::OneTaskPerCycle => accept_or_decline(pack_one_task(queue, offer)),
            Policy::Holding { hold_ms, inner } => {
                if *hold_ms == 0 {
                    inner.respond(queue, offer, now)
                } else {
                    Response::Hold { until: now + *hold_ms }
                }
            }
        }
    }

    /// Decision when a hold elapses or the master's offer timeout fires
    /// first: the inner policy applied to the then-current queue. Never
    /// holds again.
    pub fn respond_at_release(
        &self,
        queue: &[ResourceVector],
        offer: &ResourceVector,
        now: SimTime,
    ) -> Response {
        let response = match self {
            Policy::Holding { inner, .. } => inner.respond(queue, offer, now),
            other => other.respond(queue, offer, now),
        };
        match response {
            Response::Hold { .. } => Response::Decline,
            r => r,
        }
    }

    /// The refuse-offer duration the engine actually applies: zero for
    /// greedy-all regardless of configuration.
    pub fn effective_refuse_ms(&self, configured_ms: u64) -> u64 {
        match self {
            Policy::GreedyAll => 0,
            _ => configured_ms,
        }
    }

    /// The decision delay the engine actually applies: greedy-all consumes
    /// offers immediately regardless of configuration.
    pub fn effective_decision_delay_ms(&self, configured_ms: u64) -> u64 {
        match self {
            Policy::GreedyAll => 0,
            _ => configured_ms,
        }
    }
}

fn accept_or_decline(selected: Vec<usize>) -> Response {
    if selected.is_empty() {
        Response::Decline
    } else {
        Response::Accept(selected)
    }
}

/// First Fit: scan the queue once in FIFO order and take every task that
/// fits the remaining offer residual.
pub fn pack_first_fit(queue: &[ResourceVector], offer: &ResourceVector) -> Vec<usize> {
    let mut residual = *offer;
    let mut selected = Vec::new();
    for (i, demand) in queue.iter().enumerate() {
        if demand.fits_in(&residual) {
            residual = residual.subtract(demand).expect("fit check");
            selected.push(i);
        }
    }
    selected
}

/// Bin Packing: maximize the number of tasks packed into this single offer.
/// With identical task demands this is floor division on the tightest axis;
/// with mixed demands, candidates are taken in ascending order of their
/// dominant demand fraction relative to the offer (a greedy heuristic).
pub fn pack_bin_packing(queue: &[ResourceVector], offer: &ResourceVector) -> Vec<usize> {
    // Dominant fraction of demand against the offer, exact; None if the
    // demand needs an axis the offer lacks entirely.
    let fraction = |demand: &ResourceVector| -> Option<(u128, u128)> {
        let mut best: (u128, u128) = (0, 1); // num/den
        for kind in crate::resources::ResourceKind::ALL {
            let d = demand.get(kind);
            let r = offer.get(kind);
            if d == 0 {
                continue;
            }
            if r == 0 {
                return None;
            }
            if (d as u128) * best.1 > best.0 * (r as u128) {
                best = (d as u128, r as u128);
            }
        }
        Some(best)
    };

    let mut candidates: Vec<(usize, (u128, u128))> = queue
        .iter()
        .enumerate()
        .filter_map(|(i, d)| fraction(d).map(|f| (i, f)))
        .collect();
    candidates.sort_by(|(ia, (na, da)), (ib, (nb, db))| {
        (na * db).cmp(&(nb * da)).then(ia.cmp(ib))
    });

    let mut residual = *offer;
    let mut selected = Vec::new();
    for (i, _) in candidates {
        if queue[i].fits_in(&residual) {
            residual = residual.subtract(&queue[i]).expect("fit check");
            selected.push(i);
        }
    }
    selected.sort_unstable();
    // The ascending-fraction greedy is a heuristic; on mixed demands the
    // plain FIFO scan occasionally packs more. Keep the larger count.
    let fifo = pack_first_fit(queue, offer);
    if fifo.len() > selected.len() {
        fifo
    } else {
        selected
    }
}

/// One Task per Cycle: the first task in FIFO order that fits, alone.
pub fn pack_one_task(queue: &[ResourceVector], offer: &ResourceVector) -> Vec<usize> {
    queue
        .iter()
        .position(|d| d.fits_in(offer))
        .map(|i| vec![i])
        .unwrap_or_default()
}

/// Everything that defines a framework in a scenario: identity, policy,
/// attributes, and the task workload it will submit. All times are in
/// simulated milliseconds.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameworkSpec {
    pub id: String,
    pub role: String,
    pub policy: Policy,
    /// Filter duration applied after a decline or partial use.
    pub refuse_offer_ms: u64,
    /// Delay between receiving an offer and responding. Zero by default:
    /// holding is the only deliberate delay in the model.
    pub decision_delay_ms: u64,
    pub task_demand: ResourceVector,
    pub task_duration_ms: u64,
    pub task_count: u64,
    /// Interval between task arrivals; zero means the whole queue is
    /// visible at start time.
    pub arrival_interval_ms: u64,
    /// When the first task arrives.
    pub start_time_ms: u64,
    /// When the framework registers with the master and begins receiving
    /// offers. At most `start_time_ms`.
    pub registration_time_ms: u64,
}

impl FrameworkSpec {
    pub fn effective_refuse_ms(&self) -> u64 {
        self.policy.effective_refuse_ms(self.refuse_offer_ms)
    }

    pub fn effective_decision_delay_ms(&self) -> u64 {
        self.policy.effective_decision_delay_ms(self.decision_delay_ms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(cores: u64, mem: u64, disk: u64) -> ResourceVector {
        ResourceVector::from_cores(cores, mem, disk)
    }

    /// Exhaustive maximum packable count, for small queues only.
    fn max_packable(queue: &[ResourceVector], offer: &ResourceVector) -> usize {
        fn rec(queue: &[ResourceVector], i: usize, residual: ResourceVector) -> usize {
            if i == queue.len() {
                return 0;
            }
            let skip = rec(queue, i + 1, residual);
            if queue[i].fits_in(&residual) {
                let take = 1 + rec(queue, i + 1, residual.subtract(&queue[i]).unwrap());
                skip.max(take)
            } else {
                skip
            }
        }
        rec(queue, 0, *offer)
    }

    #[test]
    fn empty_queue_declines_except_holding() {
        let offer = rv(8, 16384, 32000);
        let now = SimTime::from_secs(10);
        for policy in [
            Policy::FirstFit,
            Policy::BinPacking,
            Policy::OneTaskPerCycle,
            Policy::GreedyAll,
        ] {
            assert_eq!(policy.respond(&[], &offer, now), Response::Decline);
        }
        let holding = Policy::Holding {
            hold_ms: 300_000,
            inner: Box::new(Policy::FirstFit),
        };
        assert_eq!(
            holding.respond(&[], &offer, now),
            Response::Hold {
                until: SimTime::from_secs(310)
            }
        );
    }

    #[test]
    fn bin_packing_fills_offer() {
        let queue = vec![rv(1, 1024, 0); 10];
        let offer = rv(8, 16384, 32000);
        let selected = pack_bin_packing(&queue, &offer);
        assert_eq!(selected, (0..8).collect::<Vec<_>>());
        assert_eq!(max_packable(&queue, &offer), 8);
    }

    #[test]
    fn bin_packing_queue_limited() {
        let queue = vec![rv(1, 1024, 0); 3];
        let offer = rv(8, 16384, 32000);
        assert_eq!(pack_bin_packing(&queue, &offer).len(), 3);
    }

    #[test]
    fn bin_packing_declines_on_missing_axis() {
        // Every task needs cpu; the offer has none.
        let queue = vec![rv(1, 1024, 0); 3];
        let offer = ResourceVector::new(0, 8192, 32000);
        assert!(pack_bin_packing(&queue, &offer).is_empty());
        assert_eq!(
            Policy::BinPacking.respond(&queue, &offer, SimTime::ZERO),
            Response::Decline
        );
    }

    #[test]
    fn first_fit_takes_fifo_prefix_that_fits() {
        let queue = vec![rv(1, 1024, 0); 5];
        let offer = rv(3, 16384, 0);
        assert_eq!(pack_first_fit(&queue, &offer), vec![0, 1, 2]);
    }

    #[test]
    fn first_fit_skips_oversized_task() {
        let queue = vec![rv(4, 1024, 0), rv(1, 1024, 0)];
        let offer = rv(2, 8192, 0);
        assert_eq!(pack_first_fit(&queue, &offer), vec![1]);
    }

    #[test]
    fn first_fit_nothing_fits() {
        let queue = vec![rv(4, 1024, 0)];
        let offer = rv(2, 8192, 0);
        assert!(pack_first_fit(&queue, &offer).is_empty());
        assert_eq!(
            Policy::FirstFit.respond(&queue, &offer, SimTime::ZERO),
            Response::Decline
        );
    }

    #[test]
    fn one_task_per_cycle_takes_exactly_one() {
        let queue = vec![rv(1, 1024, 0); 10];
        let offer = rv(8, 16384, 32000);
        let response = Policy::OneTaskPerCycle.respond(&queue, &offer, SimTime::ZERO);
        assert_eq!(response, Response::Accept(vec![0]));
        // Leftover after the single accepted task.
        let leftover = offer.subtract(&queue[0]).unwrap();
        assert_eq!(leftover, rv(7, 15360, 32000));
    }

    #[test]
    fn greedy_all_packs_like_bin_packing_and_forces_zero_refuse() {
        let queue = vec![rv(1, 1024, 0); 10];
        let offer = rv(8, 16384, 32000);
        assert_eq!(
            Policy::GreedyAll.respond(&queue, &offer, SimTime::ZERO),
            Policy::BinPacking.respond(&queue, &offer, SimTime::ZERO)
        );
        assert_eq!(Policy::GreedyAll.effective_refuse_ms(5_000), 0);
        assert_eq!(Policy::BinPacking.effective_refuse_ms(5_000), 5_000);
    }

    #[test]
    fn holding_applies_inner_policy_at_release() {
        let holding = Policy::Holding {
            hold_ms: 300_000,
            inner: Box::new(Policy::FirstFit),
        };
        let offer = ResourceVector::new(0, 0, 31200);
        let queue = vec![rv(1, 2048, 100); 4];
        // CPU-needing tasks never fit a disk-only offer: decline at release.
        assert_eq!(
            holding.respond_at_release(&queue, &offer, SimTime::from_secs(300)),
            Response::Decline
        );
        let useful = rv(4, 8192, 400);
        assert_eq!(
            holding.respond_at_release(&queue, &useful, SimTime::from_secs(300)),
            Response::Accept(vec![0, 1, 2, 3])
        );
    }

    #[test]
    fn zero_hold_degenerates_to_inner() {
        let holding = Policy::Holding {
            hold_ms: 0,
            inner: Box::new(Policy::FirstFit),
        };
        let queue = vec![rv(1, 1024, 0); 2];
        let offer = rv(8, 16384, 32000);
        assert_eq!(
            holding.respond(&queue, &offer, SimTime::ZERO),
            Response::Accept(vec![0, 1])
        );
    }

    fn demand_strategy() -> impl Strategy<Value = ResourceVector> {
        (1u64..=4, 256u64..=4096, 0u64..=2048)
            .prop_map(|(c, m, d)| ResourceVector::from_cores(c, m, d))
    }

    proptest! {
        #[test]
        fn packing_counts_are_ordered(
            queue in proptest::collection::vec(demand_strategy(), 0..8),
            oc in 0u64..=12, om in 0u64..=32768, od in 0u64..=8192,
        ) {
            let offer = ResourceVector::from_cores(oc, om, od);
            let bp = pack_bin_packing(&queue, &offer).len();
            let ff = pack_first_fit(&queue, &offer).len();
            let otc = pack_one_task(&queue, &offer).len();
            prop_assert!(bp >= ff);
            prop_assert!(ff >= otc);
            // Every selection fits the offer by construction.
            for selection in [pack_bin_packing(&queue, &offer), pack_first_fit(&queue, &offer)] {
                let total = selection
                    .iter()
                    .fold(ResourceVector::ZERO, |acc, &i| acc.add(&queue[i]));
                prop_assert!(total.fits_in(&offer));
            }
        }

        #[test]
        fn identical_demands_bin_packing_is_floor_division(
            cores in 1u64..=4, mem in 256u64..=4096,
            qlen in 0usize..=40,
            oc in 1u64..=16, om in 1024u64..=65536,
        ) {
            let demand = ResourceVector::from_cores(cores, mem, 0);
            let queue = vec![demand; qlen];
            let offer = ResourceVector::from_cores(oc, om, 32000);
            let expected = ((oc * 1000) / (cores * 1000)).min(om / mem).min(qlen as u64);
            prop_assert_eq!(pack_bin_packing(&queue, &offer).len() as u64, expected);
        }

        #[test]
        fn bin_packing_never_below_exhaustive_on_identical(
            cores in 1u64..=3, mem in 256u64..=2048,
            qlen in 0usize..=6,
            oc in 0u64..=8, om in 0u64..=8192,
        ) {
            let queue = vec![ResourceVector::from_cores(cores, mem, 0); qlen];
            let offer = ResourceVector::from_cores(oc, om, 0);
            prop_assert_eq!(
                pack_bin_packing(&queue, &offer).len(),
                max_packable(&queue, &offer)
            );
        }
    }
}
