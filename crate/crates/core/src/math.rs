use core::f64::consts::{PI, TAU};
use core::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by `f64` and [`Interval`](crate::Interval), so a
/// closed-form expression can be evaluated pointwise or as a sound enclosure.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Real for f64 {
    #[inline]
    fn cst(x: f64) -> Self {
        x
    }
    #[inline]
    fn sin(self) -> Self {
        libm::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        libm::cos(self)
    }
}

/// Wraps an angle to the half-open range `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x - TAU * libm::floor((x + PI) / TAU);
    // floor rounding can land exactly on +π
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

pub(crate) fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), -PI);
        assert_eq!(wrap_angle(-PI), -PI);
        assert!((wrap_angle(3.0 * PI + 0.25) - (-PI + 0.25)).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
        for k in -20..20 {
            let w = wrap_angle(0.1 * k as f64 * PI);
            assert!((-PI..PI).contains(&w));
        }
    }
}
