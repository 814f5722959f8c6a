//! Interval arithmetic and three-valued truth for predicates over boxes.
//!
//! Endpoints are computed with the same floating-point operations, in the
//! same order, as the corresponding point evaluations. Every operation used
//! is monotone under round-to-nearest, so an interval result always encloses
//! the floating-point value computed at any point of the input intervals.
//! Degenerate (point) intervals reproduce point evaluation exactly.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Halves at the midpoint.
    pub fn bisect(&self) -> (Self, Self) {
        let m = self.mid();
        (Self::new(self.lo, m), Self::new(m, self.hi))
    }

    pub fn square(self) -> Self {
        if self.lo >= 0.0 {
            Self::new(self.lo * self.lo, self.hi * self.hi)
        } else if self.hi <= 0.0 {
            Self::new(self.hi * self.hi, self.lo * self.lo)
        } else {
            Self::new(0.0, (self.lo * self.lo).max(self.hi * self.hi))
        }
    }

    /// Multiplication by a constant.
    pub fn scale(self, k: f64) -> Self {
        if k >= 0.0 {
            Self::new(self.lo * k, self.hi * k)
        } else {
            Self::new(self.hi * k, self.lo * k)
        }
    }

    /// Division by a non-zero constant.
    pub fn div_const(self, k: f64) -> Self {
        debug_assert!(k != 0.0);
        if k > 0.0 {
            Self::new(self.lo / k, self.hi / k)
        } else {
            Self::new(self.hi / k, self.lo / k)
        }
    }

    pub fn add_const(self, k: f64) -> Self {
        Self::new(self.lo + k, self.hi + k)
    }

    pub fn relu(self) -> Self {
        Self::new(self.lo.max(0.0), self.hi.max(0.0))
    }

    /// `self < other` for every pair of points.
    pub fn lt(self, other: Self) -> Tri {
        if self.hi < other.lo {
            Tri::True
        } else if self.lo >= other.hi {
            Tri::False
        } else {
            Tri::Unknown
        }
    }

    /// `self ≤ other` for every pair of points.
    pub fn le(self, other: Self) -> Tri {
        if self.hi <= other.lo {
            Tri::True
        } else if self.lo > other.hi {
            Tri::False
        } else {
            Tri::Unknown
        }
    }

    pub fn ge(self, other: Self) -> Tri {
        other.le(self)
    }

    pub fn gt(self, other: Self) -> Tri {
        other.lt(self)
    }
}

impl Add for Interval {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Neg for Interval {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        Self::new(
            p.iter().copied().fold(f64::INFINITY, f64::min),
            p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

/// Kleene three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        }
    }


    pub fn is_true(self) -> bool {
        self == Tri::True
    }

    pub fn is_false(self) -> bool {
        self == Tri::False
    }
}

impl std::ops::Not for Tri {
    type Output = Tri;

    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv() -> impl Strategy<Value = Interval> {
        (-50.0..50.0f64, 0.0..20.0f64).prop_map(|(lo, w)| Interval::new(lo, lo + w))
    }

    fn pick(i: Interval, t: f64) -> f64 {
        (i.lo + t * (i.hi - i.lo)).clamp(i.lo, i.hi)
    }

    proptest! {
        #[test]
        fn operations_enclose_points(a in iv(), b in iv(), s in 0.0..1.0f64, t in 0.0..1.0f64, k in -4.0..4.0f64) {
            let (x, y) = (pick(a, s), pick(b, t));
            prop_assert!((a + b).contains(x + y));
            prop_assert!((a - b).contains(x - y));
            prop_assert!((a * b).contains(x * y));
            prop_assert!(a.square().contains(x * x));
            prop_assert!(a.scale(k).contains(x * k));
            prop_assert!(a.relu().contains(x.max(0.0)));
            if k != 0.0 {
                prop_assert!(a.div_const(k).contains(x / k));
            }
        }

        #[test]
        fn comparisons_are_sound(a in iv(), b in iv(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
            let (x, y) = (pick(a, s), pick(b, t));
            match a.lt(b) {
                Tri::True => prop_assert!(x < y),
                Tri::False => prop_assert!(!(x < y)),
                Tri::Unknown => {}
            }
            match a.le(b) {
                Tri::True => prop_assert!(x <= y),
                Tri::False => prop_assert!(!(x <= y)),
                Tri::Unknown => {}
            }
        }
    }

    #[test]
    fn point_comparisons_are_decided() {
        let p = Interval::point;
        assert_eq!(p(1.0).lt(p(2.0)), Tri::True);
        assert_eq!(p(2.0).lt(p(2.0)), Tri::False);
        assert_eq!(p(2.0).le(p(2.0)), Tri::True);
        assert_eq!(p(3.0).le(p(2.0)), Tri::False);
    }

    #[test]
    fn square_straddling_zero() {
        assert_eq!(Interval::new(-3.0, 2.0).square(), Interval::new(0.0, 9.0));
        assert_eq!(Interval::new(-3.0, -2.0).square(), Interval::new(4.0, 9.0));
    }

    #[test]
    fn kleene_tables() {
        use Tri::*;
        assert_eq!(Unknown.and(False), False);
        assert_eq!(Unknown.and(True), Unknown);
        assert_eq!(Unknown.or(True), True);
        assert_eq!(Unknown.or(False), Unknown);
        assert_eq!(!Unknown, Unknown);
        assert_eq!(!Tri::from_bool(true), False);
    }

    #[test]
    fn bisect_covers() {
        let (l, r) = Interval::new(-1.0, 3.0).bisect();
        assert_eq!((l.lo, l.hi, r.lo, r.hi), (-1.0, 1.0, 1.0, 3.0));
    }
}
