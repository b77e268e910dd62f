//! Scalar abstraction shared by the truth arithmetic and the learner.
//!
//! Everything in this crate is written against [`Scalar`] so the same code
//! runs on `f32`, `f64`, and exact rationals. The rational instance is what
//! lets tests check the evidence identities with `==` instead of tolerances.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + Debug + Display + Send + Sync + 'static {
    fn from_f64_lossy(v: f64) -> Self;

    fn to_f64_lossy(self) -> f64;

    /// Pulls a confidence that rounded up to one back into `[0, 1)`.
    fn clamp_confidence(c: Self) -> Self;

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Total order for sorting; incomparable values (NaN) compare equal.
    fn total_cmp_lossy(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).unwrap_or(std::cmp::Ordering::Equal)
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_f64_lossy(v: f64) -> Self {
                v as $f
            }

            fn to_f64_lossy(self) -> f64 {
                self as f64
            }

            fn clamp_confidence(c: Self) -> Self {
                if c >= 1.0 {
                    1.0 - <$f>::EPSILON
                } else if c < 0.0 {
                    0.0
                } else {
                    c
                }
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Ratio<i64> {
    fn from_f64_lossy(v: f64) -> Self {
        Ratio::approximate_float(v).expect("finite value representable as a rational")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    // Rational arithmetic never rounds, so an in-range input stays in range.
    fn clamp_confidence(c: Self) -> Self {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_keeps_confidence_below_one() {
        assert!(f64::clamp_confidence(1.0) < 1.0);
        assert!(f32::clamp_confidence(1.0) < 1.0);
        assert_eq!(f64::clamp_confidence(0.25), 0.25);
    }

    #[test]
    fn rational_half_is_exact() {
        assert_eq!(Ratio::<i64>::half(), Ratio::new(1, 2));
        assert_eq!(Ratio::<i64>::from_f64_lossy(0.75), Ratio::new(3, 4));
    }
}
