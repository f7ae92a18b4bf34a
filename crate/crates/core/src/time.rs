//! Simulated time in integer picoseconds.
//!
//! Integer time keeps event ordering exact: a 64-byte packet on a 10 Gb/s
//! link serializes in 51.2 ns, which nanoseconds cannot represent.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

pub const PICOS_PER_SECOND: u64 = 1_000_000_000_000;

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub fn from_secs_f64(secs: f64) -> Self {
        SimTime((secs * PICOS_PER_SECOND as f64).round() as u64)
    }

    pub fn from_millis_f64(ms: f64) -> Self {
        SimTime((ms * 1e9).round() as u64)
    }

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms * 1_000_000_000)
    }

    pub const fn from_micros(us: u64) -> Self {
        SimTime(us * 1_000_000)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * PICOS_PER_SECOND)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / PICOS_PER_SECOND as f64
    }

    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / 1e9
    }

    pub fn saturating_sub(self, other: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(other.0))
    }

    /// Time to clock `bits` onto a link of `rate_bps`, rounded up.
    pub fn serialization(bits: u64, rate_bps: u64) -> SimTime {
        let num = bits as u128 * PICOS_PER_SECOND as u128;
        SimTime(num.div_ceil(rate_bps as u128) as u64)
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        self.0 += rhs.0;
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

/// Renders as seconds with all twelve fractional digits, so the text form
/// is exact and sorts lexically within equal integer parts.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:012}", self.0 / PICOS_PER_SECOND, self.0 % PICOS_PER_SECOND)
    }
}

impl fmt::Debug for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}s")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialization_is_exact_for_ten_gigabit() {
        assert_eq!(SimTime::serialization(64 * 8, 10_000_000_000), SimTime(51_200));
        assert_eq!(SimTime::serialization(1064 * 8, 10_000_000_000), SimTime(851_200));
        assert_eq!(SimTime::serialization(1, 3), SimTime(333_333_333_334));
    }

    #[test]
    fn display_round_trips_digits() {
        assert_eq!(SimTime::from_millis(30).to_string(), "0.030000000000");
        assert_eq!(SimTime(1_000_000_000_001).to_string(), "1.000000000001");
    }
}
