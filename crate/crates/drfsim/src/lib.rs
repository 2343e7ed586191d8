//! Deterministic discrete-event simulator of a Mesos-style two-level
//! scheduling cluster.
//!
//! The first scheduling level is the master's allocation module: every
//! allocation cycle it offers each agent's free resources to the registered
//! framework with the lowest dominant share (the Mesos variant of Dominant
//! Resource Fairness, including per-framework offer-refusal filters and
//! held offers counting toward usage). The second level is the framework
//! side: pluggable policies that map queued tasks onto the offers they
//! receive (first-fit, bin-packing, one-task-per-cycle, greedy, holding).
//!
//! The crate ships:
//!
//! - [`resources`] — resource vectors, fit tests, dominant-share arithmetic
//! - [`allocator`] — the DRF allocation cycle, offer filters, and a
//!   classical demand-vector DRF allocator used as a comparison oracle
//! - [`policy`] — framework scheduling policies and per-framework attributes
//! - [`engine`] — the deterministic event loop driving agents, offers,
//!   responses, and task lifecycles
//! - [`metrics`] — per-second task timelines, the area-based unfairness
//!   metric, makespan, and utilization
//! - [`scenario`] — the scenario file format (parse, validate, serialize)
//! - [`builtins`] — the built-in scenario catalog
//! - [`runner`] — seed sweeps and CSV output
//!
//! Every simulation is reproducible: the same scenario and seed produce a
//! bit-identical event log and CSV output. See the `examples/` directory
//! for one runnable example per major capability, and the `drfsim` binary
//! for the `run` / `list` / `validate` command-line front end.

pub mod allocator;
pub mod builtins;
pub mod engine;
pub mod metrics;
pub mod policy;
pub mod resources;
pub mod runner;
pub mod scenario;
pub mod simtime;

pub use engine::{run, SimulationResult};
pub use resources::{DominantShare, ResourceKind, ResourceVector};
pub use scenario::ScenarioConfig;
pub use simtime::SimTime;
