//! The deterministic discrete-event clock driving the cluster loop: agents
//! advertise free resources, the allocation module assigns offers,
//! frameworks respond (accept with task lists, decline, or hold), tasks
//! launch, run, and finish.
//!
//! Same-instant events settle in a fixed order — task finishes, then offer
//! timeouts, then framework registrations, then the allocation cycle, then
//! offer responses, then task arrivals — so resources freed at an instant
//! are visible to that instant's allocation, and offers assigned in a cycle
//! are answered before the next task arrives. Within one class, insertion
//! order decides. Everything is integer milliseconds; no float enters event
//! ordering.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;

use crate::allocator::{AgentId, AllocationState, FrameworkId};
use crate::policy::Response;
use crate::resources::ResourceVector;
use crate::scenario::{validate, ScenarioConfig};
use crate::simtime::SimTime;

/// Lifecycle record of one task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskRecord {
    /// `<framework-id>/<n>`, n counting from 0 in arrival order.
    pub name: String,
    /// Index into the scenario's framework list.
    pub framework: usize,
    pub demand: ResourceVector,
    pub duration_ms: u64,
    pub arrival: SimTime,
    pub launch: Option<SimTime>,
    pub finish: Option<SimTime>,
    pub agent: Option<usize>,
}

impl TaskRecord {
    pub fn is_running_at(&self, instant: SimTime) -> bool {
        match (self.launch, self.finish) {
            (Some(l), Some(f)) => l <= instant && instant < f,
            (Some(l), None) => l <= instant,
            _ => false,
        }
    }
}

/// One line of the replayable event log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogEvent {
    FrameworkRegistered {
        t: SimTime,
        fw: String,
    },
    TaskArrived {
        t: SimTime,
        fw: String,
        task: String,
    },
    OfferAssigned {
        t: SimTime,
        agent: usize,
        fw: String,
        resources: ResourceVector,
    },
    OfferUnassigned {
        t: SimTime,
        agent: usize,
        resources: ResourceVector,
    },
    OfferAccepted {
        t: SimTime,
        fw: String,
        agent: usize,
        tasks: usize,
        used: ResourceVector,
        leftover: ResourceVector,
    },
    OfferDeclined {
        t: SimTime,
        fw: String,
        agent: usize,
        resources: ResourceVector,
    },
    OfferHeld {
        t: SimTime,
        fw: String,
        agent: usize,
        resources: ResourceVector,
        until: SimTime,
    },
    OfferReclaimed {
        t: SimTime,
        fw: String,
        agent: usize,
        resources: ResourceVector,
    },
    FilterAdded {
        t: SimTime,
        fw: String,
        agent: usize,
        expires_at: SimTime,
    },
    TaskLaunched {
        t: SimTime,
        fw: String,
        task: String,
        agent: usize,
        demand: ResourceVector,
    },
    LaunchError {
        t: SimTime,
        fw: String,
        agent: usize,
        requested: ResourceVector,
        offered: ResourceVector,
    },
    TaskFinished {
        t: SimTime,
        fw: String,
        task: String,
        agent: usize,
        demand: ResourceVector,
    },
    Truncated {
        t: SimTime,
    },
}

impl fmt::Display for LogEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogEvent::FrameworkRegistered { t, fw } => write!(f, "{t} registered fw={fw}"),
            LogEvent::TaskArrived { t, fw, task } => write!(f, "{t} task_arrived fw={fw} task={task}"),
            LogEvent::OfferAssigned { t, agent, fw, resources } => {
                write!(f, "{t} offer_assigned agent=agent-{agent} fw={fw} resources={resources}")
            }
            LogEvent::OfferUnassigned { t, agent, resources } => {
                write!(f, "{t} offer_unassigned agent=agent-{agent} resources={resources}")
            }
            LogEvent::OfferAccepted { t, fw, agent, tasks, used, leftover } => write!(
                f,
                "{t} offer_accepted fw={fw} agent=agent-{agent} tasks={tasks} used={used} leftover={leftover}"
            ),
            LogEvent::OfferDeclined { t, fw, agent, resources } => {
                write!(f, "{t} offer_declined fw={fw} agent=agent-{agent} resources={resources}")
            }
            LogEvent::OfferHeld { t, fw, agent, resources, until } => write!(
                f,
                "{t} offer_held fw={fw} agent=agent-{agent} resources={resources} until={until}"
            ),
            LogEvent::OfferReclaimed { t, fw, agent, resources } => {
                write!(f, "{t} offer_reclaimed fw={fw} agent=agent-{agent} resources={resources}")
            }
            LogEvent::FilterAdded { t, fw, agent, expires_at } => {
                write!(f, "{t} filter_added fw={fw} agent=agent-{agent} expires_at={expires_at}")
            }
            LogEvent::TaskLaunched { t, fw, task, agent, demand } => {
                write!(f, "{t} task_launched fw={fw} task={task} agent=agent-{agent} demand={demand}")
            }
            LogEvent::LaunchError { t, fw, agent, requested, offered } => write!(
                f,
                "{t} launch_error fw={fw} agent=agent-{agent} requested={requested} offered={offered}"
            ),
            LogEvent::TaskFinished { t, fw, task, agent, demand } => {
                write!(f, "{t} task_finished fw={fw} task={task} agent=agent-{agent} demand={demand}")
            }
            LogEvent::Truncated { t } => write!(f, "{t} truncated"),
        }
    }
}

/// Everything a run produces: the scenario echo, per-task records, and an
/// ordered event log sufficient to replay the run.
#[derive(Clone, Debug)]
pub struct SimulationResult {
    pub config: ScenarioConfig,
    pub tasks: Vec<TaskRecord>,
    pub end_time: SimTime,
    /// Set when max time was reached with unfinished work.
    pub truncated: bool,
    pub event_log: Vec<LogEvent>,
}

impl SimulationResult {
    /// Newline-delimited text dump of the event log.
    pub fn dump_event_log(&self) -> String {
        let mut s = String::new();
        for e in &self.event_log {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }

    pub fn tasks_of(&self, framework: usize) -> impl Iterator<Item = &TaskRecord> {
        self.tasks.iter().filter(move |t| t.framework == framework)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum EventKind {
    TaskFinish { task: usize },
    OfferTimeout { offer: u64 },
    FrameworkStart { fw: usize },
    AdvertiseAndAllocate,
    OfferResponse { offer: u64 },
    TaskArrival { task: usize },
}

impl EventKind {
    /// Same-instant ordering class.
    fn class(&self) -> u8 {
        match self {
            EventKind::TaskFinish { .. } => 0,
            EventKind::OfferTimeout { .. } => 1,
            EventKind::FrameworkStart { .. } => 2,
            EventKind::AdvertiseAndAllocate => 3,
            EventKind::OfferResponse { .. } => 4,
            EventKind::TaskArrival { .. } => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Event {
    time: SimTime,
    class: u8,
    seq: u64,
    kind: EventKind,
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time, self.class, self.seq).cmp(&(other.time, other.class, other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct AgentState {
    capacity: ResourceVector,
    free: ResourceVector,
    running: ResourceVector,
    outstanding: ResourceVector,
}

struct FrameworkRuntime {
    id: FrameworkId,
    queue: VecDeque<usize>,
}

#[derive(Clone, Debug)]
struct OutstandingOffer {
    agent: usize,
    resources: ResourceVector,
    holder: usize,
    master_timeout_at: Option<SimTime>,
    holder_release_at: Option<SimTime>,
}

pub(crate) struct Engine {
    config: ScenarioConfig,
    now: SimTime,
    seq: u64,
    events: BinaryHeap<Reverse<Event>>,
    agents: Vec<AgentState>,
    frameworks: Vec<FrameworkRuntime>,
    tasks: Vec<TaskRecord>,
    alloc: AllocationState,
    offers: HashMap<u64, OutstandingOffer>,
    next_offer_id: u64,
    arrived: u64,
    launched: u64,
    finished: u64,
    log: Vec<LogEvent>,
}

impl Engine {
    pub(crate) fn new(config: &ScenarioConfig) -> Engine {
        let mut alloc = AllocationState::new(config.cluster_total(), config.seed);
        let mut frameworks = Vec::new();
        for spec in &config.frameworks {
            let id = alloc.add_framework(&spec.id, &spec.role);
            frameworks.push(FrameworkRuntime {
                id,
                queue: VecDeque::new(),
            });
        }
        let agents = (0..config.cluster.agents)
            .map(|_| AgentState {
                capacity: config.cluster.agent_resources,
                free: config.cluster.agent_resources,
                running: ResourceVector::ZERO,
                outstanding: ResourceVector::ZERO,
            })
            .collect();

        let mut engine = Engine {
            config: config.clone(),
            now: SimTime::ZERO,
            seq: 0,
            events: BinaryHeap::new(),
            agents,
            frameworks,
            tasks: Vec::new(),
            alloc,
            offers: HashMap::new(),
            next_offer_id: 0,
            arrived: 0,
            launched: 0,
            finished: 0,
            log: Vec::new(),
        };

        for (f, spec) in config.frameworks.iter().enumerate() {
            engine.schedule(
                SimTime::from_millis(spec.registration_time_ms),
                EventKind::FrameworkStart { fw: f },
            );
            for k in 0..spec.task_count {
                let arrival =
                    SimTime::from_millis(spec.start_time_ms + k * spec.arrival_interval_ms);
                let task = engine.tasks.len();
                engine.tasks.push(TaskRecord {
                    name: format!("{}/{}", spec.id, k),
                    framework: f,
                    demand: spec.task_demand,
                    duration_ms: spec.task_duration_ms,
                    arrival,
                    launch: None,
                    finish: None,
                    agent: None,
                });
                engine.schedule(arrival, EventKind::TaskArrival { task });
            }
        }
        engine.schedule(SimTime::ZERO, EventKind::AdvertiseAndAllocate);
        engine
    }

    fn schedule(&mut self, time: SimTime, kind: EventKind) {
        let class = kind.class();
        self.events.push(Reverse(Event {
            time,
            class,
            seq: self.seq,
            kind,
        }));
        self.seq += 1;
    }

    fn all_done(&self) -> bool {
        self.finished == self.tasks.len() as u64
    }

    /// Processes the next event if it lies within max time. Returns false
    /// when the simulation is over.
    pub(crate) fn step(&mut self) -> bool {
        if self.all_done() {
            return false;
        }
        let max_time = SimTime::from_millis(self.config.max_time_ms);
        loop {
            let Some(Reverse(next)) = self.events.pop() else {
                return false;
            };
            if next.time > max_time {
                return false;
            }
            self.now = next.time;
            match next.kind {
                EventKind::TaskFinish { task } => self.on_task_finish(task),
                EventKind::OfferTimeout { offer } => {
                    // Stale timers for already-closed offers are no-ops.
                    if !self.offers.contains_key(&offer) {
                        continue;
                    }
                    self.on_offer_timeout(offer);
                }
                EventKind::FrameworkStart { fw } => self.on_framework_start(fw),
                EventKind::AdvertiseAndAllocate => self.on_advertise_and_allocate(),
                EventKind::OfferResponse { offer } => {
                    if !self.offers.contains_key(&offer) {
                        continue;
                    }
                    self.on_offer_response(offer);
                }
                EventKind::TaskArrival { task } => self.on_task_arrival(task),
            }
            self.check_conservation();
            return true;
        }
    }

    pub(crate) fn run_to_completion(mut self) -> SimulationResult {
        while self.step() {}
        let truncated = !self.all_done();
        let end_time = if truncated {
            SimTime::from_millis(self.config.max_time_ms)
        } else {
            self.now
        };
        if truncated {
            self.log.push(LogEvent::Truncated { t: end_time });
        }
        SimulationResult {
            config: self.config,
            tasks: self.tasks,
            end_time,
            truncated,
            event_log: self.log,
        }
    }

    fn fw_name(&self, fw: usize) -> String {
        self.config.frameworks[fw].id.clone()
    }

    fn on_framework_start(&mut self, fw: usize) {
        self.alloc.register(self.frameworks[fw].id, self.now);
        self.log.push(LogEvent::FrameworkRegistered {
            t: self.now,
            fw: self.fw_name(fw),
        });
    }

    fn on_task_arrival(&mut self, task: usize) {
        let fw = self.tasks[task].framework;
        self.frameworks[fw].queue.push_back(task);
        self.arrived += 1;
        self.log.push(LogEvent::TaskArrived {
            t: self.now,
            fw: self.fw_name(fw),
            task: self.tasks[task].name.clone(),
        });
    }

    fn on_task_finish(&mut self, task: usize) {
        let record = &mut self.tasks[task];
        record.finish = Some(self.now);
        let demand = record.demand;
        let agent = record.agent.expect("finishing task has an agent");
        let fw = record.framework;
        let name = record.name.clone();
        let a = &mut self.agents[agent];
        a.running = a.running.subtract(&demand).expect("agent running underflow");
        a.free = a.free.add(&demand);
        self.alloc.release(self.frameworks[fw].id, &demand);
        self.finished += 1;
        self.log.push(LogEvent::TaskFinished {
            t: self.now,
            fw: self.fw_name(fw),
            task: name,
            agent,
            demand,
        });
    }

    fn on_advertise_and_allocate(&mut self) {
        self.alloc.expire_filters(self.now);
        let offers_in: Vec<(AgentId, ResourceVector)> = self
            .agents
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.free.is_zero())
            .map(|(i, a)| (AgentId(i), a.free))
            .collect();
        let assignments = self.alloc.allocation_cycle(&offers_in, self.now);
        for assignment in assignments {
            let agent = assignment.agent.0;
            match assignment.framework {
                Some(fw_id) => {
                    let fw = fw_id.0;
                    let a = &mut self.agents[agent];
                    a.free = a
                        .free
                        .subtract(&assignment.resources)
                        .expect("offer exceeds agent free pool");
                    a.outstanding = a.outstanding.add(&assignment.resources);
                    let id = self.next_offer_id;
                    self.next_offer_id += 1;
                    let spec = &self.config.frameworks[fw];
                    let master_timeout_at = self
                        .config
                        .master_offer_timeout_ms
                        .map(|d| self.now + d);
                    self.offers.insert(
                        id,
                        OutstandingOffer {
                            agent,
                            resources: assignment.resources,
                            holder: fw,
                            master_timeout_at,
                            holder_release_at: None,
                        },
                    );
                    self.log.push(LogEvent::OfferAssigned {
                        t: self.now,
                        agent,
                        fw: spec.id.clone(),
                        resources: assignment.resources,
                    });
                    let delay = spec.effective_decision_delay_ms();
                    let respond_at = self.now + delay;
                    // A slow decider can lose the offer to the master's
                    // timeout before ever answering.
                    if let Some(timeout_at) = master_timeout_at {
                        if delay > 0 && timeout_at < respond_at {
                            self.schedule(timeout_at, EventKind::OfferTimeout { offer: id });
                        }
                    }
                    self.schedule(respond_at, EventKind::OfferResponse { offer: id });
                }
                None => {
                    self.log.push(LogEvent::OfferUnassigned {
                        t: self.now,
                        agent,
                        resources: assignment.resources,
                    });
                }
            }
        }
        let next = self.now + self.config.allocation_interval_ms;
        self.schedule(next, EventKind::AdvertiseAndAllocate);
    }

    fn visible_demands(&self, fw: usize) -> Vec<ResourceVector> {
        self.frameworks[fw]
            .queue
            .iter()
            .map(|&t| self.tasks[t].demand)
            .collect()
    }

    fn on_offer_response(&mut self, offer_id: u64) {
        let offer = self.offers[&offer_id].clone();
        if offer.holder_release_at.is_some() {
            return; // already held; the release timer owns it now
        }
        let fw = offer.holder;
        let spec = &self.config.frameworks[fw];
        let demands = self.visible_demands(fw);
        let response = spec.policy.respond(&demands, &offer.resources, self.now);
        match response {
            Response::Accept(indices) => self.apply_accept(offer_id, &indices),
            Response::Decline => self.apply_decline(offer_id),
            Response::Hold { until } => {
                let o = self.offers.get_mut(&offer_id).unwrap();
                o.holder_release_at = Some(until);
                let effective = match o.master_timeout_at {
                    Some(m) => m.min(until),
                    None => until,
                };
                self.log.push(LogEvent::OfferHeld {
                    t: self.now,
                    fw: self.fw_name(fw),
                    agent: offer.agent,
                    resources: offer.resources,
                    until: effective,
                });
                self.schedule(effective, EventKind::OfferTimeout { offer: offer_id });
            }
        }
    }

    fn on_offer_timeout(&mut self, offer_id: u64) {
        let offer = self.offers[&offer_id].clone();
        if offer.holder_release_at.is_some() {
            // Hold elapsed or master timeout fired first: the policy gets
            // the then-current queue one last time.
            let fw = offer.holder;
            let spec = &self.config.frameworks[fw];
            let demands = self.visible_demands(fw);
            match spec
                .policy
                .respond_at_release(&demands, &offer.resources, self.now)
            {
                Response::Accept(indices) => self.apply_accept(offer_id, &indices),
                _ => self.apply_decline(offer_id),
            }
        } else {
            // Master reclaimed an offer the framework never answered.
            let o = self.offers.remove(&offer_id).unwrap();
            let a = &mut self.agents[o.agent];
            a.outstanding = a.outstanding.subtract(&o.resources).expect("outstanding");
            a.free = a.free.add(&o.resources);
            self.alloc
                .release(self.frameworks[o.holder].id, &o.resources);
            self.log.push(LogEvent::OfferReclaimed {
                t: self.now,
                fw: self.fw_name(o.holder),
                agent: o.agent,
                resources: o.resources,
            });
        }
    }

    /// Launches the queue entries at `indices` against the offer. An accept
    /// whose demands exceed the offer is a launch error: nothing launches,
    /// the whole offer returns to the pool, and the tasks stay queued.
    fn apply_accept(&mut self, offer_id: u64, indices: &[usize]) {
        let offer = self.offers[&offer_id].clone();
        let fw = offer.holder;
        let selected: Vec<usize> = indices
            .iter()
            .map(|&pos| self.frameworks[fw].queue[pos])
            .collect();
        let total: ResourceVector = selected
            .iter()
            .fold(ResourceVector::ZERO, |acc, &t| acc.add(&self.tasks[t].demand));

        if selected.is_empty() || !total.fits_in(&offer.resources) {
            self.offers.remove(&offer_id);
            let a = &mut self.agents[offer.agent];
            a.outstanding = a.outstanding.subtract(&offer.resources).expect("outstanding");
            a.free = a.free.add(&offer.resources);
            self.alloc.release(self.frameworks[fw].id, &offer.resources);
            self.log.push(LogEvent::LaunchError {
                t: self.now,
                fw: self.fw_name(fw),
                agent: offer.agent,
                requested: total,
                offered: offer.resources,
            });
            return;
        }

        self.offers.remove(&offer_id);
        let leftover = offer.resources.subtract(&total).expect("fit check");
        {
            let a = &mut self.agents[offer.agent];
            a.outstanding = a.outstanding.subtract(&offer.resources).expect("outstanding");
            a.running = a.running.add(&total);
            a.free = a.free.add(&leftover);
        }
        self.alloc.release(self.frameworks[fw].id, &leftover);

        let keep: std::collections::HashSet<usize> = selected.iter().copied().collect();
        self.frameworks[fw].queue.retain(|t| !keep.contains(t));

        for &task in &selected {
            let record = &mut self.tasks[task];
            record.launch = Some(self.now);
            record.agent = Some(offer.agent);
            let finish_at = self.now + record.duration_ms;
            let name = record.name.clone();
            let demand = record.demand;
            self.launched += 1;
            self.schedule(finish_at, EventKind::TaskFinish { task });
            self.log.push(LogEvent::TaskLaunched {
                t: self.now,
                fw: self.fw_name(fw),
                task: name,
                agent: offer.agent,
                demand,
            });
        }
        self.log.push(LogEvent::OfferAccepted {
            t: self.now,
            fw: self.fw_name(fw),
            agent: offer.agent,
            tasks: selected.len(),
            used: total,
            leftover,
        });
        // Partial use backs the framework off this agent, like a decline.
        if !leftover.is_zero() {
            self.add_refuse_filter(fw, offer.agent);
        }
    }

    fn apply_decline(&mut self, offer_id: u64) {
        let offer = self.offers.remove(&offer_id).unwrap();
        let fw = offer.holder;
        let a = &mut self.agents[offer.agent];
        a.outstanding = a.outstanding.subtract(&offer.resources).expect("outstanding");
        a.free = a.free.add(&offer.resources);
        self.alloc.release(self.frameworks[fw].id, &offer.resources);
        self.log.push(LogEvent::OfferDeclined {
            t: self.now,
            fw: self.fw_name(fw),
            agent: offer.agent,
            resources: offer.resources,
        });
        self.add_refuse_filter(fw, offer.agent);
    }

    fn add_refuse_filter(&mut self, fw: usize, agent: usize) {
        let duration = self.config.frameworks[fw].effective_refuse_ms();
        if duration == 0 {
            return;
        }
        self.alloc
            .add_filter(self.frameworks[fw].id, AgentId(agent), duration, self.now);
        self.log.push(LogEvent::FilterAdded {
            t: self.now,
            fw: self.fw_name(fw),
            agent,
            expires_at: self.now + duration,
        });
    }

    /// Exact conservation at every event boundary; any violation is a
    /// bookkeeping bug and aborts the run.
    fn check_conservation(&self) {
        let mut free_total = ResourceVector::ZERO;
        for (i, a) in self.agents.iter().enumerate() {
            let sum = a.free.add(&a.running).add(&a.outstanding);
            assert_eq!(sum, a.capacity, "agent-{i} books do not add up");
            free_total = free_total.add(&a.free);
        }
        assert_eq!(
            free_total.add(&self.alloc.total_usage()),
            self.config.cluster_total(),
            "cluster books do not add up"
        );
        let queued: u64 = self.frameworks.iter().map(|f| f.queue.len() as u64).sum();
        assert_eq!(
            queued + (self.launched - self.finished) + self.finished,
            self.arrived,
            "task count books do not add up"
        );
    }
}

/// Runs a scenario to completion (or to its max time, setting the
/// truncation flag). The config must already be valid; see
/// [`crate::scenario::validate`].
pub fn run(config: &ScenarioConfig) -> SimulationResult {
    if let Err(e) = validate(config) {
        panic!("run() requires a valid scenario: {e}");
    }
    Engine::new(config).run_to_completion()
}
