//! Closed real intervals with outward rounding.
//!
//! Every arithmetic result is widened by one ulp on each side (two for the
//! transcendental functions, whose libm implementations are not correctly
//! rounded), so the true real-valued result of the operation on any points of
//! the operands is always contained in the returned interval.

use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::math::Real;

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Interval {
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Builds `[lo, hi]`; bounds are swapped if given out of order.
    pub fn new(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self { lo: hi, hi: lo }
        }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    #[inline]
    fn rounded(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            return Self::ENTIRE;
        }
        Self {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn mid(self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Largest absolute value in the interval.
    pub fn mag(self) -> f64 {
        libm::fmax(libm::fabs(self.lo), libm::fabs(self.hi))
    }

    pub fn hull(self, other: Self) -> Self {
        Self {
            lo: libm::fmin(self.lo, other.lo),
            hi: libm::fmax(self.hi, other.hi),
        }
    }

    pub fn sqr(self) -> Self {
        if self.lo >= 0.0 {
            Self::rounded(self.lo * self.lo, self.hi * self.hi)
        } else if self.hi <= 0.0 {
            Self::rounded(self.hi * self.hi, self.lo * self.lo)
        } else {
            let m = self.mag();
            Self {
                lo: 0.0,
                hi: (m * m).next_up(),
            }
        }
    }

    pub fn sin(self) -> Self {
        if !self.is_finite() || self.width() >= TAU {
            return Self::new(-1.0, 1.0);
        }
        let (sa, sb) = (libm::sin(self.lo), libm::sin(self.hi));
        let mut lo = libm::fmin(sa, sb);
        let mut hi = libm::fmax(sa, sb);
        if hits_phase(self.lo, self.hi, FRAC_PI_2) {
            hi = 1.0;
        }
        if hits_phase(self.lo, self.hi, -FRAC_PI_2) {
            lo = -1.0;
        }
        unit_clamped(lo, hi)
    }

    pub fn cos(self) -> Self {
        if !self.is_finite() || self.width() >= TAU {
            return Self::new(-1.0, 1.0);
        }
        let (ca, cb) = (libm::cos(self.lo), libm::cos(self.hi));
        let mut lo = libm::fmin(ca, cb);
        let mut hi = libm::fmax(ca, cb);
        if hits_phase(self.lo, self.hi, 0.0) {
            hi = 1.0;
        }
        if hits_phase(self.lo, self.hi, PI) {
            lo = -1.0;
        }
        unit_clamped(lo, hi)
    }
}

/// Conservative test for `phase + 2kπ ∈ [a, b]` for some integer k. May
/// answer `true` for a phase just outside the interval, never `false` for one
/// inside it.
fn hits_phase(a: f64, b: f64, phase: f64) -> bool {
    let k = libm::ceil((a - phase) / TAU - 1e-9);
    phase + k * TAU <= b + 1e-9
}

fn unit_clamped(lo: f64, hi: f64) -> Interval {
    let lo = lo.next_down().next_down();
    let hi = hi.next_up().next_up();
    Interval {
        lo: libm::fmax(lo, -1.0),
        hi: libm::fmin(hi, 1.0),
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

impl Add for Interval {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::rounded(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::rounded(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
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
        if p.iter().any(|v| v.is_nan()) {
            return Self::ENTIRE;
        }
        let lo = p.iter().copied().fold(f64::INFINITY, libm::fmin);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, libm::fmax);
        Self::rounded(lo, hi)
    }
}

impl Div for Interval {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.contains_zero() {
            return Self::ENTIRE;
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        if q.iter().any(|v| v.is_nan()) {
            return Self::ENTIRE;
        }
        let lo = q.iter().copied().fold(f64::INFINITY, libm::fmin);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, libm::fmax);
        Self::rounded(lo, hi)
    }
}

impl Real for Interval {
    fn cst(x: f64) -> Self {
        Self::point(x)
    }
    fn sin(self) -> Self {
        Interval::sin(self)
    }
    fn cos(self) -> Self {
        Interval::cos(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sin_hits_extrema() {
        let s = Interval::new(1.0, 2.0).sin();
        assert_eq!(s.hi(), 1.0);
        assert!(s.lo() <= libm::sin(1.0));
        let c = Interval::new(-0.1, 0.1).cos();
        assert_eq!(c.hi(), 1.0);
        let c = Interval::new(3.0, 3.3).cos();
        assert_eq!(c.lo(), -1.0);
    }

    #[test]
    fn division_by_zero_straddle_is_entire() {
        let q = Interval::new(1.0, 2.0) / Interval::new(-1.0, 1.0);
        assert!(!q.is_finite());
    }

    #[test]
    fn sqr_straddling_zero() {
        let s = Interval::new(-2.0, 1.0).sqr();
        assert_eq!(s.lo(), 0.0);
        assert!(s.hi() >= 4.0);
    }

    fn interval() -> impl Strategy<Value = Interval> {
        (-10.0f64..10.0, 0.0f64..3.0).prop_map(|(a, w)| Interval::new(a, a + w))
    }

    proptest! {
        #[test]
        fn enclosure_contains_point_images(a in interval(), b in interval(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let x = a.lo() + s * a.width();
            let y = b.lo() + t * b.width();
            prop_assert!((a + b).contains(x + y));
            prop_assert!((a - b).contains(x - y));
            prop_assert!((a * b).contains(x * y));
            prop_assert!(a.sqr().contains(x * x));
            prop_assert!(a.sin().contains(libm::sin(x)));
            prop_assert!(a.cos().contains(libm::cos(x)));
            if !b.contains_zero() {
                prop_assert!((a / b).contains(x / y));
            }
        }
    }
}
