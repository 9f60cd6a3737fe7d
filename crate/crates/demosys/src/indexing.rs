//! Index bookkeeping for the orthonormal family.
//!
//! The construction lives on two half-intervals. Each level n >= 1 owns the
//! band (-2^(-n+1), -2^(-n)] on the left half, split into 2^n equal dyadic
//! subintervals, and the block of flat indices k in (k_{n-1}, k_n] with
//! k_n = 2(2^n - 1). The flat index doubles as the Rademacher index used on
//! the right half, so all three views (k, (n, j), support interval) must stay
//! in exact bijection.

use crate::error::{Error, Result};

/// Flat index k >= 1 enumerating the whole system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlatIndex(pub u64);

impl std::fmt::Display for FlatIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position (n, j) with 1 <= j <= 2^n inside level n >= 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelPosition {
    pub level: u32,
    pub position: u64,
}

impl LevelPosition {
    pub fn new(level: u32, position: u64) -> Result<Self> {
        if level == 0 || level >= 63 {
            return Err(Error::LevelOutOfRange(level));
        }
        if position == 0 || position > (1u64 << level) {
            return Err(Error::PositionOutOfRange {
                n: level,
                j: position,
            });
        }
        Ok(LevelPosition { level, position })
    }
}

/// A left-open, right-closed interval with exact dyadic endpoints
/// `(num_left, num_right] / 2^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    num_left: i128,
    num_right: i128,
    exp: u32,
}

impl DyadicInterval {
    pub fn left(&self) -> f64 {
        self.num_left as f64 / (self.exp as f64).exp2()
    }

    pub fn right(&self) -> f64 {
        self.num_right as f64 / (self.exp as f64).exp2()
    }

    /// Exact numerators and the shared power-of-two denominator exponent.
    pub fn raw(&self) -> (i128, i128, u32) {
        (self.num_left, self.num_right, self.exp)
    }

    pub fn length(&self) -> f64 {
        (self.num_right - self.num_left) as f64 / (self.exp as f64).exp2()
    }

    /// Membership test for the half-open interval (left, right].
    pub fn contains(&self, x: f64) -> bool {
        x > self.left() && x <= self.right()
    }

    /// Exact disjointness check against another interval (possibly of a
    /// different level, hence different denominator).
    pub fn disjoint(&self, other: &DyadicInterval) -> bool {
        // Compare at the common denominator 2^max(exp).
        let e = self.exp.max(other.exp);
        let (al, ar) = (
            self.num_left << (e - self.exp),
            self.num_right << (e - self.exp),
        );
        let (bl, br) = (
            other.num_left << (e - other.exp),
            other.num_right << (e - other.exp),
        );
        ar <= bl || br <= al
    }
}

/// Cumulative level boundary k_n = 2(2^n - 1), with k_0 = 0.
///
/// Panics if `n >= 63` (the flat index would not fit in u64).
pub fn level_boundary(n: u32) -> FlatIndex {
    assert!(n < 63, "level boundary k_{n} exceeds u64");
    FlatIndex(2 * ((1u64 << n) - 1))
}

/// Inverse of [`to_flat`]: the unique (n, j) with k = k_{n-1} + j.
pub fn to_level(k: FlatIndex) -> Result<LevelPosition> {
    if k.0 == 0 {
        return Err(Error::ZeroFlatIndex);
    }
    // k + 2 lies in (2^n, 2^(n+1)], so n = floor(log2(k + 1)).
    let n = 63 - (k.0 + 1).leading_zeros();
    let j = k.0 - level_boundary(n - 1).0;
    debug_assert!(j >= 1 && j <= (1u64 << n));
    Ok(LevelPosition {
        level: n,
        position: j,
    })
}

/// Flat index k = k_{n-1} + j of the position (n, j).
pub fn to_flat(pos: LevelPosition) -> FlatIndex {
    FlatIndex(level_boundary(pos.level - 1).0 + pos.position)
}

/// The j-th subinterval (counted left to right) of the level-n band
/// (-2^(-n+1), -2^(-n)]; each has length 2^(-2n).
pub fn support_interval(pos: LevelPosition) -> DyadicInterval {
    let n = pos.level;
    let j = pos.position as i128;
    // -2^(-n+1) = -2^(n+1) / 2^(2n); each step adds 1/2^(2n).
    let base = -(1i128 << (n + 1));
    DyadicInterval {
        num_left: base + (j - 1),
        num_right: base + j,
        exp: 2 * n,
    }
}

/// Index of the Rademacher function paired with position (n, j); coincides
/// with the flat index k_{n-1} + j.
pub fn rademacher_index(pos: LevelPosition) -> FlatIndex {
    to_flat(pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn boundaries() {
        assert_eq!(level_boundary(0).0, 0);
        assert_eq!(level_boundary(1).0, 2);
        assert_eq!(level_boundary(2).0, 6);
        assert_eq!(level_boundary(3).0, 14);
        assert_eq!(level_boundary(10).0, 2046);
    }

    #[test]
    fn to_level_examples() {
        assert_eq!(
            to_level(FlatIndex(1)).unwrap(),
            LevelPosition {
                level: 1,
                position: 1
            }
        );
        assert_eq!(
            to_level(FlatIndex(6)).unwrap(),
            LevelPosition {
                level: 2,
                position: 4
            }
        );
        assert_eq!(
            to_level(FlatIndex(7)).unwrap(),
            LevelPosition {
                level: 3,
                position: 1
            }
        );
        assert!(to_level(FlatIndex(0)).is_err());
    }

    #[test]
    fn to_flat_examples() {
        assert_eq!(to_flat(LevelPosition::new(1, 1).unwrap()).0, 1);
        assert_eq!(to_flat(LevelPosition::new(2, 4).unwrap()).0, 6);
        assert_eq!(to_flat(LevelPosition::new(3, 1).unwrap()).0, 7);
        assert!(LevelPosition::new(2, 5).is_err());
        assert!(LevelPosition::new(2, 0).is_err());
    }

    #[test]
    fn rademacher_index_examples() {
        assert_eq!(rademacher_index(LevelPosition::new(1, 2).unwrap()).0, 2);
        assert_eq!(rademacher_index(LevelPosition::new(2, 1).unwrap()).0, 3);
    }

    #[test]
    fn support_examples() {
        let d = support_interval(LevelPosition::new(1, 1).unwrap());
        assert_eq!((d.left(), d.right()), (-1.0, -0.75));
        let d = support_interval(LevelPosition::new(1, 2).unwrap());
        assert_eq!((d.left(), d.right()), (-0.75, -0.5));
        let d = support_interval(LevelPosition::new(2, 1).unwrap());
        assert_eq!((d.left(), d.right()), (-0.5, -7.0 / 16.0));
    }

    #[test]
    fn level_tiling() {
        for n in 1..=8u32 {
            let mut total_len = 0.0;
            let mut prev_right = None;
            for j in 1..=(1u64 << n) {
                let d = support_interval(LevelPosition::new(n, j).unwrap());
                assert!((d.length() - (-2.0 * n as f64).exp2()).abs() < 1e-15);
                total_len += d.length();
                if let Some(r) = prev_right {
                    // Consecutive subintervals share an endpoint exactly.
                    assert_eq!(d.raw().0, r);
                }
                prev_right = Some(d.raw().1);
            }
            // The level tiles its band: total length 2^(-n), right end -2^(-n).
            assert!((total_len - (-(n as f64)).exp2()).abs() < 1e-15);
            let last = support_interval(LevelPosition::new(n, 1 << n).unwrap());
            assert_eq!(last.right(), -(-(n as f64)).exp2());
        }
    }

    #[test]
    fn cross_level_disjointness() {
        for n1 in 1..=6u32 {
            for n2 in 1..=6u32 {
                for j1 in 1..=(1u64 << n1) {
                    for j2 in 1..=(1u64 << n2) {
                        if (n1, j1) == (n2, j2) {
                            continue;
                        }
                        let a = support_interval(LevelPosition::new(n1, j1).unwrap());
                        let b = support_interval(LevelPosition::new(n2, j2).unwrap());
                        assert!(a.disjoint(&b), "({n1},{j1}) overlaps ({n2},{j2})");
                    }
                }
            }
        }
    }

    #[test]
    fn measure_accumulates_to_left_half() {
        let mut total = 0.0;
        for n in 1..=40u32 {
            total += (-(n as f64)).exp2();
        }
        assert!((total - 1.0).abs() < 1e-11);
    }

    proptest! {
        #[test]
        fn bijection_roundtrip(k in 1u64..=level_boundary(12).0) {
            let pos = to_level(FlatIndex(k)).unwrap();
            prop_assert!(pos.position >= 1 && pos.position <= (1u64 << pos.level));
            prop_assert_eq!(to_flat(pos).0, k);
            prop_assert_eq!(rademacher_index(pos).0, k);
        }

        #[test]
        fn interval_positions_sane(n in 1u32..=12, seed in 0u64..1_000) {
            let j = seed % (1u64 << n) + 1;
            let d = support_interval(LevelPosition::new(n, j).unwrap());
            prop_assert!(d.left() >= -1.0 && d.right() <= 0.0);
            prop_assert!(d.left() < d.right());
        }
    }
}
