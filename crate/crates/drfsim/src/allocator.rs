//! The master's allocation module: the Mesos-variant DRF cycle with
//! per-framework offer filters, plus a classical demand-vector DRF
//! allocator used as a small-scale comparison oracle.
//!
//! The Mesos variant differs from classical DRF in three ways: resources
//! are pooled across agents and offered one whole agent at a time, the
//! master never sees framework demands, and a framework may reject all or
//! part of an offer. Held and outstanding offers count toward a
//! framework's usage, which is what makes offer hoarding visible to the
//! dominant-share sort.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::resources::ResourceVector;
use crate::simtime::SimTime;

/// Index of a framework in registration-declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameworkId(pub usize);

/// Index of an agent in cluster-declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

/// While `now < expires_at`, resources from `agent` must not be offered to
/// `framework`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FilterEntry {
    pub framework: FrameworkId,
    pub agent: AgentId,
    pub expires_at: SimTime,
}

#[derive(Clone, Debug)]
struct FrameworkSlot {
    name: String,
    role: usize,
    registered_at: Option<SimTime>,
    usage: ResourceVector,
}

/// One offer's outcome from an allocation cycle, in agent-visit order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OfferAssignment {
    pub agent: AgentId,
    pub resources: ResourceVector,
    /// `None` when every framework held an active filter for the agent.
    pub framework: Option<FrameworkId>,
}

/// Cluster-wide allocation bookkeeping: totals, per-framework usage
/// (launched tasks plus outstanding/held offers), the filter table, roles,
/// and the seeded random source that orders agents within a cycle.
#[derive(Clone, Debug)]
pub struct AllocationState {
    cluster_total: ResourceVector,
    frameworks: Vec<FrameworkSlot>,
    roles: Vec<String>,
    filters: HashMap<(FrameworkId, AgentId), SimTime>,
    rng: ChaCha8Rng,
}

impl AllocationState {
    pub fn new(cluster_total: ResourceVector, seed: u64) -> Self {
        Self {
            cluster_total,
            frameworks: Vec::new(),
            roles: Vec::new(),
            filters: HashMap::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn cluster_total(&self) -> ResourceVector {
        self.cluster_total
    }

    /// Declares a framework in the given role. It receives no offers until
    /// [`register`](Self::register) is called.
    pub fn add_framework(&mut self, name: &str, role: &str) -> FrameworkId {
        let role_idx = match self.roles.iter().position(|r| r == role) {
            Some(i) => i,
            None => {
                self.roles.push(role.to_string());
                self.roles.len() - 1
            }
        };
        self.frameworks.push(FrameworkSlot {
            name: name.to_string(),
            role: role_idx,
            registered_at: None,
            usage: ResourceVector::ZERO,
        });
        FrameworkId(self.frameworks.len() - 1)
    }

    pub fn register(&mut self, fw: FrameworkId, now: SimTime) {
        self.frameworks[fw.0].registered_at = Some(now);
    }

    pub fn is_registered(&self, fw: FrameworkId) -> bool {
        self.frameworks[fw.0].registered_at.is_some()
    }

    pub fn framework_name(&self, fw: FrameworkId) -> &str {
        &self.frameworks[fw.0].name
    }

    pub fn usage_of(&self, fw: FrameworkId) -> ResourceVector {
        self.frameworks[fw.0].usage
    }

    /// Sum of all per-framework usage. Together with unallocated free
    /// resources this must equal the cluster total at every instant.
    pub fn total_usage(&self) -> ResourceVector {
        self.frameworks
            .iter()
            .fold(ResourceVector::ZERO, |acc, f| acc.add(&f.usage))
    }

    /// Charges resources to a framework's usage (offer assigned or held).
    pub fn charge(&mut self, fw: FrameworkId, resources: &ResourceVector) {
        self.frameworks[fw.0].usage = self.frameworks[fw.0].usage.add(resources);
    }

    /// Releases resources from a framework's usage (offer declined, leftover
    /// returned, or task finished). Underflow means the engine's bookkeeping
    /// is broken and aborts the simulation.
    pub fn release(&mut self, fw: FrameworkId, resources: &ResourceVector) {
        self.frameworks[fw.0].usage = self.frameworks[fw.0]
            .usage
            .subtract(resources)
            .expect("usage release underflow");
    }

    /// Inserts a filter suppressing offers of `agent`'s resources to `fw`
    /// until `now + duration_ms`. Duration zero inserts nothing. Entries for
    /// the same (framework, agent) pair merge by keeping the later expiry.
    pub fn add_filter(&mut self, fw: FrameworkId, agent: AgentId, duration_ms: u64, now: SimTime) {
        if duration_ms == 0 {
            return;
        }
        let expires_at = now + duration_ms;
        let entry = self.filters.entry((fw, agent)).or_insert(expires_at);
        if expires_at > *entry {
            *entry = expires_at;
        }
    }

    /// Removes all entries with `expires_at <= now`.
    pub fn expire_filters(&mut self, now: SimTime) {
        self.filters.retain(|_, &mut expires_at| expires_at > now);
    }

    pub fn is_filtered(&self, fw: FrameworkId, agent: AgentId, now: SimTime) -> bool {
        self.filters
            .get(&(fw, agent))
            .is_some_and(|&expires_at| expires_at > now)
    }

    pub fn filter_entries(&self) -> Vec<FilterEntry> {
        let mut entries: Vec<FilterEntry> = self
            .filters
            .iter()
            .map(|(&(framework, agent), &expires_at)| FilterEntry {
                framework,
                agent,
                expires_at,
            })
            .collect();
        entries.sort_by_key(|e| (e.framework, e.agent));
        entries
    }

    fn registered_members(&self, role: usize) -> Vec<FrameworkId> {
        (0..self.frameworks.len())
            .map(FrameworkId)
            .filter(|&fw| self.frameworks[fw.0].role == role && self.is_registered(fw))
            .collect()
    }

    fn sort_members(&self, members: &mut [FrameworkId]) {
        members.sort_by(|&a, &b| {
            let sa = &self.frameworks[a.0];
            let sb = &self.frameworks[b.0];
            sa.usage
                .dominant_ratio(&self.cluster_total)
                .cmp_value(&sb.usage.dominant_ratio(&self.cluster_total))
                .then(sa.registered_at.cmp(&sb.registered_at))
                .then(sa.name.cmp(&sb.name))
        });
    }

    /// Registered frameworks of a role in ascending dominant-share order,
    /// ties broken by earliest registration time then name.
    pub fn sort_frameworks(&self, role: &str) -> Vec<FrameworkId> {
        let Some(role_idx) = self.roles.iter().position(|r| r == role) else {
            return Vec::new();
        };
        let mut members = self.registered_members(role_idx);
        self.sort_members(&mut members);
        members
    }

    /// Roles in ascending order of the minimum dominant share among their
    /// registered members. The role-level sort key is not pinned down by the
    /// allocation algorithm's description; using the best-placed member keeps
    /// the single-role case (every shipped scenario) unaffected.
    fn sorted_roles(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.roles.len()).collect();
        order.sort_by(|&a, &b| {
            let key = |role: usize| {
                self.registered_members(role)
                    .iter()
                    .map(|&fw| {
                        self.frameworks[fw.0]
                            .usage
                            .dominant_ratio(&self.cluster_total)
                    })
                    .min_by(|x, y| x.cmp_value(y))
            };
            match (key(a), key(b)) {
                (Some(x), Some(y)) => x.cmp_value(&y).then(a.cmp(&b)),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => a.cmp(&b),
            }
        });
        order
    }

    /// Runs one allocation cycle: agents in seeded-random order; for each,
    /// roles then frameworks in DRF-sorted order; the offer goes to the
    /// first framework holding no active filter for the agent. Each
    /// assignment is charged to the assignee's usage immediately, so later
    /// sorts within the same cycle see it. An offer filtered by every
    /// framework is returned unassigned.
    pub fn allocation_cycle(
        &mut self,
        offers: &[(AgentId, ResourceVector)],
        now: SimTime,
    ) -> Vec<OfferAssignment> {
        let mut order: Vec<usize> = (0..offers.len()).collect();
        order.shuffle(&mut self.rng);

        let mut out = Vec::with_capacity(offers.len());
        for idx in order {
            let (agent, resources) = offers[idx];
            let mut assignee = None;
            'roles: for role in self.sorted_roles() {
                let mut members = self.registered_members(role);
                self.sort_members(&mut members);
                for fw in members {
                    if self.is_filtered(fw, agent, now) {
                        continue;
                    }
                    assignee = Some(fw);
                    break 'roles;
                }
            }
            if let Some(fw) = assignee {
                self.charge(fw, &resources);
            }
            out.push(OfferAssignment {
                agent,
                resources,
                framework: assignee,
            });
        }
        out
    }
}

/// Default grant cap for [`classical_drf_allocate`].
pub const DEFAULT_MAX_GRANTS: u64 = 1_000_000;

/// A user's per-task demand in the classical algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandVector {
    pub owner: String,
    pub demand: ResourceVector,
}

/// Classical demand-vector DRF by progressive filling: repeatedly grant one
/// demand-unit to the user with the lowest dominant share (ties by input
/// order) until no demand fits the remainder or `max_steps` is reached.
/// Returns the multiple `n` per user; the user's offer is `n` times its
/// demand vector. Axes with zero total constrain nothing unless a demand
/// needs them; all-zero demands receive zero.
pub fn classical_drf_allocate(
    total: ResourceVector,
    demands: &[DemandVector],
    max_steps: u64,
) -> BTreeMap<String, u64> {
    let mut counts: Vec<u64> = vec![0; demands.len()];
    let mut usage: Vec<ResourceVector> = vec![ResourceVector::ZERO; demands.len()];
    let mut remaining = total;

    let mut steps = 0;
    while steps < max_steps {
        let next = (0..demands.len())
            .filter(|&i| !demands[i].demand.is_zero() && demands[i].demand.fits_in(&remaining))
            .min_by(|&a, &b| {
                usage[a]
                    .dominant_ratio(&total)
                    .cmp_value(&usage[b].dominant_ratio(&total))
                    .then(a.cmp(&b))
            });
        let Some(i) = next else { break };
        remaining = remaining
            .subtract(&demands[i].demand)
            .expect("fit check guarantees subtraction");
        usage[i] = usage[i].add(&demands[i].demand);
        counts[i] += 1;
        steps += 1;
    }

    demands
        .iter()
        .zip(counts)
        .map(|(d, n)| (d.owner.clone(), n))
        .collect()
}
