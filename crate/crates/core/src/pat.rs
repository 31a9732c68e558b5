//! Fixed-point perceived arrival time (PAT) arithmetic.
//!
//! PAT values are stored as integer milliseconds so that repeated penalty
//! accumulation stays exact and platform independent. Penalty weights are
//! dimensionless factors with 1/1000 resolution; multiplying a weight by a
//! whole number of seconds therefore lands exactly on the millisecond grid.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A perceived arrival time or perceived duration, in milliseconds.
///
/// `Pat::INFINITY` marks "no feasible option". All arithmetic is
/// overflow-checked; adding infinity to anything yields infinity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pat(i64);

impl Pat {
    pub const ZERO: Pat = Pat(0);
    pub const INFINITY: Pat = Pat(i64::MAX);

    pub fn from_millis(millis: i64) -> Pat {
        debug_assert!(millis >= 0);
        Pat(millis)
    }

    pub fn from_seconds(seconds: u32) -> Pat {
        Pat(seconds as i64 * 1000)
    }

    pub fn is_finite(self) -> bool {
        self.0 != i64::MAX
    }

    /// Millisecond count; `i64::MAX` for infinity.
    pub fn millis(self) -> i64 {
        self.0
    }

    pub fn as_seconds_f64(self) -> f64 {
        if self.is_finite() {
            self.0 as f64 / 1000.0
        } else {
            f64::INFINITY
        }
    }

    pub fn checked_add(self, rhs: Pat) -> Pat {
        if !self.is_finite() || !rhs.is_finite() {
            return Pat::INFINITY;
        }
        Pat(self.0.checked_add(rhs.0).expect("PAT overflow"))
    }

    /// Difference of two finite values. Panics on infinity or negative result
    /// in debug builds; both indicate misuse.
    pub fn checked_sub(self, rhs: Pat) -> Pat {
        debug_assert!(self.is_finite() && rhs.is_finite());
        debug_assert!(self.0 >= rhs.0);
        Pat(self.0 - rhs.0)
    }

    pub fn min(self, rhs: Pat) -> Pat {
        if self.0 <= rhs.0 {
            self
        } else {
            rhs
        }
    }
}

impl fmt::Debug for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "Pat({}ms)", self.0)
        } else {
            write!(f, "Pat(inf)")
        }
    }
}

/// Dimensionless penalty weight with 1/1000 resolution, e.g. 0.5 or 2.0.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Weight(u32);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    pub const ONE: Weight = Weight(1000);

    /// Largest accepted weight factor.
    pub const MAX_FACTOR: f64 = 1000.0;

    pub fn from_f64(value: f64) -> Result<Weight, WeightError> {
        if !value.is_finite() || value < 0.0 {
            return Err(WeightError::Negative(value));
        }
        if value > Self::MAX_FACTOR {
            return Err(WeightError::TooLarge(value));
        }
        let scaled = value * 1000.0;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 {
            return Err(WeightError::Resolution(value));
        }
        Ok(Weight(rounded as u32))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Weight times a duration in whole seconds, exact on the millisecond grid.
    pub fn times_seconds(self, seconds: u32) -> Pat {
        Pat(self.0 as i64 * seconds as i64)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WeightError {
    #[error("penalty weight must be non-negative, got {0}")]
    Negative(f64),
    #[error("penalty weight {0} exceeds the supported maximum of 1000")]
    TooLarge(f64),
    #[error("penalty weight {0} is finer than the supported 1/1000 resolution")]
    Resolution(f64),
}

/// Penalty weights and tolerances entering perceived arrival times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyParams {
    /// Flat penalty added per vehicle-to-vehicle transfer.
    pub transfer_penalty: Pat,
    /// Weight on waiting time outside the departure buffer window.
    pub wait_weight: Weight,
    /// Weight on walking time (on top of the elapsed time itself).
    pub walk_weight: Weight,
    /// Weight on departure buffer time.
    pub buffer_weight: Weight,
    /// Maximum perceived delay a passenger accepts over the best option.
    pub delay_tolerance: Pat,
}

impl PenaltyParams {
    /// Neutral parameters: no penalties, five minutes of delay tolerance.
    pub fn neutral() -> PenaltyParams {
        PenaltyParams {
            transfer_penalty: Pat::ZERO,
            wait_weight: Weight::ZERO,
            walk_weight: Weight::ZERO,
            buffer_weight: Weight::ZERO,
            delay_tolerance: Pat::from_seconds(300),
        }
    }

    /// Walking time plus the walking penalty: `(1 + walk_weight) * seconds`.
    pub fn walk_cost(&self, seconds: u32) -> Pat {
        Pat::from_seconds(seconds).checked_add(self.walk_weight.times_seconds(seconds))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_round_trips_half_steps() {
        assert_eq!(Weight::from_f64(0.5).unwrap().as_f64(), 0.5);
        assert_eq!(Weight::from_f64(2.0).unwrap().as_f64(), 2.0);
        assert_eq!(Weight::from_f64(0.0).unwrap(), Weight::ZERO);
    }

    #[test]
    fn weight_rejects_bad_values() {
        assert_eq!(Weight::from_f64(-0.1), Err(WeightError::Negative(-0.1)));
        assert!(matches!(Weight::from_f64(0.0005), Err(WeightError::Resolution(_))));
        assert!(matches!(Weight::from_f64(1e9), Err(WeightError::TooLarge(_))));
    }

    #[test]
    fn weight_times_seconds_is_exact() {
        let half = Weight::from_f64(0.5).unwrap();
        assert_eq!(half.times_seconds(10), Pat::from_millis(5000));
        assert_eq!(half.times_seconds(1), Pat::from_millis(500));
    }

    #[test]
    fn infinity_absorbs_addition() {
        let inf = Pat::INFINITY;
        assert_eq!(inf.checked_add(Pat::from_seconds(5)), Pat::INFINITY);
        assert_eq!(Pat::from_seconds(5).checked_add(inf), Pat::INFINITY);
        assert!(!inf.is_finite());
    }

    #[test]
    #[should_panic(expected = "PAT overflow")]
    fn addition_overflow_panics() {
        let big = Pat::from_millis(i64::MAX - 1);
        let _ = big.checked_add(Pat::from_millis(i64::MAX - 1));
    }
}
