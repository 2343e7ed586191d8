//! Resource vectors, arithmetic, fit tests, and dominant-share computation.
//!
//! Quantities are stored as fixed-point integers (CPU in millicores, memory
//! and disk in whole megabytes) so that conservation invariants hold exactly
//! over arbitrarily long simulations. Fractions are computed in floating
//! point only at read time.

use std::fmt;

use thiserror::Error;

/// Millicores per CPU core.
pub const MILLIS_PER_CORE: u64 = 1000;

/// The three resource types tracked by the simulator, in tie-break order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResourceKind {
    Cpu,
    Mem,
    Disk,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 3] = [ResourceKind::Cpu, ResourceKind::Mem, ResourceKind::Disk];

    pub fn name(self) -> &'static str {
        match self {
            ResourceKind::Cpu => "cpu",
            ResourceKind::Mem => "mem",
            ResourceKind::Disk => "disk",
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("resource underflow on {kind}: {have} - {take}")]
pub struct UnderflowError {
    pub kind: ResourceKind,
    pub have: u64,
    pub take: u64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("cluster total has zero {kind}; dominant share undefined")]
pub struct ZeroTotalError {
    pub kind: ResourceKind,
}

/// Quantities of CPU, memory, and disk. The unit of all accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ResourceVector {
    cpu_millis: u64,
    mem_mb: u64,
    disk_mb: u64,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector {
        cpu_millis: 0,
        mem_mb: 0,
        disk_mb: 0,
    };

    pub const fn new(cpu_millis: u64, mem_mb: u64, disk_mb: u64) -> Self {
        Self {
            cpu_millis,
            mem_mb,
            disk_mb,
        }
    }

    /// Builds a vector from whole CPU cores.
    pub const fn from_cores(cores: u64, mem_mb: u64, disk_mb: u64) -> Self {
        Self::new(cores * MILLIS_PER_CORE, mem_mb, disk_mb)
    }

    /// Builds a vector from a possibly fractional core count (e.g. `0.5`).
    /// The value is rounded to the nearest millicore.
    pub fn from_cores_f64(cores: f64, mem_mb: u64, disk_mb: u64) -> Self {
        Self::new((cores * MILLIS_PER_CORE as f64).round() as u64, mem_mb, disk_mb)
    }

    pub fn cpu_millis(&self) -> u64 {
        self.cpu_millis
    }

    pub fn cpu_cores(&self) -> f64 {
        self.cpu_millis as f64 / MILLIS_PER_CORE as f64
    }

    pub fn mem_mb(&self) -> u64 {
        self.mem_mb
    }

    pub fn disk_mb(&self) -> u64 {
        self.disk_mb
    }

    pub fn get(&self, kind: ResourceKind) -> u64 {
        match kind {
            ResourceKind::Cpu => self.cpu_millis,
            ResourceKind::Mem => self.mem_mb,
            ResourceKind::Disk => self.disk_mb,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// Componentwise sum.
    pub fn add(&self, other: &ResourceVector) -> ResourceVector {
        ResourceVector {
            cpu_millis: self.cpu_millis + other.cpu_millis,
            mem_mb: self.mem_mb + other.mem_mb,
            disk_mb: self.disk_mb + other.disk_mb,
        }
    }

    /// Componentwise difference. A component that would go negative is an
    /// error, never a silent clamp: it signals a bookkeeping bug.
    pub fn subtract(&self, other: &ResourceVector) -> Result<ResourceVector, UnderflowError> {
        for kind in ResourceKind::ALL {
            if other.get(kind) > self.get(kind) {
                return Err(UnderflowError {
                    kind,
                    have: self.get(kind),
                    take: other.get(kind),
                });
            }
        }
        Ok(ResourceVector {
            cpu_millis: self.cpu_millis - other.cpu_millis,
            mem_mb: self.mem_mb - other.mem_mb,
            disk_mb: self.disk_mb - other.disk_mb,
        })
    }

    /// True iff this demand fits within `available` componentwise.
    pub fn fits_in(&self, available: &ResourceVector) -> bool {
        ResourceKind::ALL
            .iter()
            .all(|&k| self.get(k) <= available.get(k))
    }

    /// Usage fraction per resource type. Requires every total component > 0.
    pub fn fractions_of(&self, total: &ResourceVector) -> Result<[f64; 3], ZeroTotalError> {
        for kind in ResourceKind::ALL {
            if total.get(kind) == 0 {
                return Err(ZeroTotalError { kind });
            }
        }
        Ok([
            self.cpu_millis as f64 / total.cpu_millis as f64,
            self.mem_mb as f64 / total.mem_mb as f64,
            self.disk_mb as f64 / total.disk_mb as f64,
        ])
    }

    /// The dominant share of this usage against a cluster total: the maximum
    /// per-resource usage fraction, with ties broken by the fixed order
    /// CPU, then memory, then disk.
    pub fn dominant_share(&self, total: &ResourceVector) -> Result<DominantShare, ZeroTotalError> {
        for kind in ResourceKind::ALL {
            if total.get(kind) == 0 {
                return Err(ZeroTotalError { kind });
            }
        }
        let ratio = self.dominant_ratio(total);
        Ok(DominantShare {
            value: ratio.value(),
            kind: ratio.kind,
        })
    }

    /// Exact dominant fraction as an integer ratio, skipping axes where the
    /// total is zero (such an axis constrains nothing when nothing demands
    /// it). Used by the allocator for bit-exact sorting and tie detection.
    pub(crate) fn dominant_ratio(&self, total: &ResourceVector) -> Ratio {
        let mut best = Ratio {
            num: 0,
            den: 1,
            kind: ResourceKind::Cpu,
        };
        for kind in ResourceKind::ALL {
            let den = total.get(kind);
            if den == 0 {
                continue;
            }
            let candidate = Ratio {
                num: self.get(kind),
                den,
                kind,
            };
            if candidate.cmp_value(&best) == std::cmp::Ordering::Greater {
                best = candidate;
            }
        }
        best
    }
}

impl fmt::Display for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}cpu,{}mb,{}mb)",
            format_cores(self.cpu_millis),
            self.mem_mb,
            self.disk_mb
        )
    }
}

fn format_cores(millis: u64) -> String {
    if millis.is_multiple_of(MILLIS_PER_CORE) {
        format!("{}", millis / MILLIS_PER_CORE)
    } else {
        format!("{:.3}", millis as f64 / MILLIS_PER_CORE as f64)
    }
}

/// A usage fraction represented exactly as num/den for comparisons that must
/// not depend on floating-point rounding.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Ratio {
    pub num: u64,
    pub den: u64,
    pub kind: ResourceKind,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Compares two fractions exactly via cross-multiplication.
    pub fn cmp_value(&self, other: &Ratio) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

/// The maximum usage fraction of a framework and the resource attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominantShare {
    /// Fraction in `[0, 1]` for any usage within the total.
    pub value: f64,
    /// A resource whose fraction equals `value`.
    pub kind: ResourceKind,
}
