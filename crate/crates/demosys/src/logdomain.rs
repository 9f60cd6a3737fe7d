//! Nonnegative reals carried as base-2 logarithms.
//!
//! Norms of deep-level combinations involve factors like 2^(n(p-2)) with
//! n in the hundreds, far beyond the f64 range. `LogNum` stores log2 of a
//! nonnegative value and performs sums through log-add-exp, so power sums
//! stay finite wherever their logarithms do.

use std::cmp::Ordering;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};

/// A nonnegative real number represented by its base-2 logarithm.
///
/// Zero is `log2 = -inf`. NaN payloads are rejected at construction.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogNum {
    log2: f64,
}

fn log2_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

impl LogNum {
    pub const ZERO: LogNum = LogNum {
        log2: f64::NEG_INFINITY,
    };
    pub const ONE: LogNum = LogNum { log2: 0.0 };

    /// Wraps a base-2 logarithm. `-inf` encodes zero.
    pub fn from_log2(log2: f64) -> Self {
        debug_assert!(!log2.is_nan());
        LogNum { log2 }
    }

    /// Converts a nonnegative finite value.
    pub fn from_f64(x: f64) -> Self {
        debug_assert!(x >= 0.0, "LogNum requires a nonnegative value, got {x}");
        LogNum { log2: x.log2() }
    }

    pub fn log2(self) -> f64 {
        self.log2
    }

    /// Linear value; overflows to `inf` when the logarithm exceeds the f64 range.
    pub fn to_f64(self) -> f64 {
        self.log2.exp2()
    }

    pub fn is_zero(self) -> bool {
        self.log2 == f64::NEG_INFINITY
    }

    /// Self raised to the power `e` (for e = 0 returns one, including at zero).
    pub fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            return LogNum::ONE;
        }
        LogNum {
            log2: self.log2 * e,
        }
    }

    pub fn recip(self) -> Self {
        LogNum { log2: -self.log2 }
    }

    pub fn max(self, other: Self) -> Self {
        if self.log2 >= other.log2 {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self.log2 <= other.log2 {
            self
        } else {
            other
        }
    }

    /// Total order; valid because NaN is excluded by construction.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.log2.total_cmp(&other.log2)
    }
}

impl Add for LogNum {
    type Output = LogNum;
    fn add(self, rhs: Self) -> Self {
        LogNum {
            log2: log2_add_exp(self.log2, rhs.log2),
        }
    }
}

impl AddAssign for LogNum {
    fn add_assign(&mut self, rhs: Self) {
        self.log2 = log2_add_exp(self.log2, rhs.log2);
    }
}

impl Mul for LogNum {
    type Output = LogNum;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return LogNum::ZERO;
        }
        LogNum {
            log2: self.log2 + rhs.log2,
        }
    }
}

impl MulAssign for LogNum {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Div for LogNum {
    type Output = LogNum;
    fn div(self, rhs: Self) -> Self {
        debug_assert!(!rhs.is_zero(), "division of LogNum by zero");
        if self.is_zero() {
            return LogNum::ZERO;
        }
        LogNum {
            log2: self.log2 - rhs.log2,
        }
    }
}

impl Sum for LogNum {
    fn sum<I: Iterator<Item = LogNum>>(iter: I) -> Self {
        iter.fold(LogNum::ZERO, |acc, x| acc + x)
    }
}

impl std::fmt::Display for LogNum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lin = self.to_f64();
        if lin.is_finite() {
            write!(f, "{lin}")
        } else {
            write!(f, "2^{}", self.log2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_linear() {
        let a = LogNum::from_f64(3.5);
        let b = LogNum::from_f64(0.25);
        assert!(((a + b).to_f64() - 3.75).abs() < 1e-14);
    }

    #[test]
    fn zero_is_identity() {
        let a = LogNum::from_f64(7.0);
        assert_eq!((a + LogNum::ZERO).to_f64(), 7.0);
        assert!((LogNum::ZERO + a).log2() == a.log2());
        assert!((a * LogNum::ZERO).is_zero());
    }

    #[test]
    fn huge_values_stay_finite() {
        let a = LogNum::from_log2(2000.0);
        let b = LogNum::from_log2(1999.0);
        let s = a + b;
        assert!((s.log2() - 2000.0f64 - 1.5f64.log2()).abs() < 1e-12);
        assert!(s.to_f64().is_infinite());
    }

    #[test]
    fn pow_and_div() {
        let a = LogNum::from_f64(4.0);
        assert!((a.powf(0.5).to_f64() - 2.0).abs() < 1e-14);
        assert!((a / LogNum::from_f64(8.0)).to_f64() - 0.5 < 1e-14);
        assert_eq!(LogNum::ZERO.powf(0.0).to_f64(), 1.0);
    }

    #[test]
    fn sum_of_many_small() {
        let total: LogNum = (0..1000).map(|_| LogNum::from_f64(0.001)).sum();
        assert!((total.to_f64() - 1.0).abs() < 1e-11);
    }
}
