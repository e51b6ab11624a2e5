use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// An exact rational utility value.
///
/// Utility levels come from very different scales depending on the oracle
/// behind them: integer grids, half-integer sums in the synthetic
/// environment, and fifth-of-a-point composite scores from language-model
/// scoring. Comparing those against level thresholds with floats would be
/// fragile, so all comparisons and arithmetic here are exact.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UtilityValue(Ratio<i64>);

impl UtilityValue {
    pub const ZERO: UtilityValue = UtilityValue(Ratio::new_raw(0, 1));

    /// A sentinel strictly below any utility value that occurs in practice.
    /// Every agent approves every statement at this level.
    pub const BOTTOM: UtilityValue = UtilityValue(Ratio::new_raw(i64::MIN / 4, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "utility denominator must be nonzero");
        UtilityValue(Ratio::new(numer, denom))
    }

    pub fn from_int(v: i64) -> Self {
        UtilityValue(Ratio::from_integer(v))
    }

    /// A half-integer value `halves / 2`.
    pub fn from_halves(halves: i64) -> Self {
        UtilityValue(Ratio::new(halves, 2))
    }

    /// Snaps a float onto an exact rational with the given denominator
    /// (rounding to the nearest step). Used when scores originate from
    /// floating-point quantities such as token probabilities.
    pub fn from_f64_snapped(value: f64, denom: i64) -> Self {
        assert!(denom > 0);
        assert!(value.is_finite(), "cannot convert non-finite float to utility");
        let numer = (value * denom as f64).round() as i64;
        UtilityValue(Ratio::new(numer, denom))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("i64 ratio always converts")
    }

    pub fn abs(&self) -> Self {
        UtilityValue(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Add for UtilityValue {
    type Output = UtilityValue;
    fn add(self, rhs: Self) -> Self {
        UtilityValue(self.0 + rhs.0)
    }
}

impl Sub for UtilityValue {
    type Output = UtilityValue;
    fn sub(self, rhs: Self) -> Self {
        UtilityValue(self.0 - rhs.0)
    }
}

impl Neg for UtilityValue {
    type Output = UtilityValue;
    fn neg(self) -> Self {
        UtilityValue(-self.0)
    }
}

impl fmt::Debug for UtilityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for UtilityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_exact() {
        let a = UtilityValue::from_halves(3); // 1.5
        let b = UtilityValue::new(29, 20); // 1.45
        assert!(a > b);
        assert_eq!(a - b, UtilityValue::new(1, 20));
    }

    #[test]
    fn bottom_is_below_everything_practical() {
        assert!(UtilityValue::BOTTOM < UtilityValue::from_int(-1_000_000));
        assert!(UtilityValue::BOTTOM < UtilityValue::ZERO);
    }

    #[test]
    fn float_snapping() {
        let v = UtilityValue::from_f64_snapped(5.5000000001, 1000);
        assert_eq!(v, UtilityValue::from_halves(11));
    }
}
