//! Simulated time. Integer milliseconds internally so event ordering never
//! depends on floating-point comparison; scenario files speak in seconds.

use std::fmt;
use std::ops::{Add, Sub};

/// A point on the simulated clock, in whole milliseconds since start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(u64);

pub const MILLIS_PER_SEC: u64 = 1000;

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms)
    }

    pub const fn from_secs(secs: u64) -> Self {
        SimTime(secs * MILLIS_PER_SEC)
    }

    /// Seconds-to-millis conversion for scenario values, rounded to the
    /// nearest millisecond.
    pub fn from_secs_f64(secs: f64) -> Self {
        SimTime((secs * MILLIS_PER_SEC as f64).round() as u64)
    }

    pub fn as_millis(&self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(&self) -> f64 {
        self.0 as f64 / MILLIS_PER_SEC as f64
    }

    /// The whole second this instant falls in.
    pub fn whole_secs(&self) -> u64 {
        self.0 / MILLIS_PER_SEC
    }
}

impl Add<u64> for SimTime {
    type Output = SimTime;

    /// Adds a duration in milliseconds.
    fn add(self, ms: u64) -> SimTime {
        SimTime(self.0 + ms)
    }
}

impl Sub<SimTime> for SimTime {
    type Output = u64;

    /// Elapsed milliseconds between two instants.
    fn sub(self, earlier: SimTime) -> u64 {
        self.0 - earlier.0
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}", self.as_secs_f64())
    }
}
