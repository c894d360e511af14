//! Numeric traits the metric kernels are generic over.
//!
//! Two tiers exist. [`Fraction`] is enough for the ratio-valued metrics
//! (specialization scores, the disruption index) and is implemented by the
//! floating types as well as `Ratio<i64>`, so those metrics can be evaluated
//! exactly. [`Scalar`] adds the transcendental operations needed by the
//! statistical code (z-scores, logistic regression, bootstrap).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Ratio-valued quantity: f32, f64 or an exact rational.
pub trait Fraction:
    Num + Copy + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static
{
    fn from_counts(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("count fits the scalar")
            / Self::from_i64(den).expect("count fits the scalar")
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn to_f64_lossy(self) -> f64;
}

impl Fraction for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Fraction for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Fraction for Ratio<i64> {
    fn from_counts(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64_lossy(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// floating point: f32 or f64
pub trait Scalar: Float + Fraction + ToPrimitive + Display + Sum + Default {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every float type")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to every float type")
    }

    fn of_i128(n: i128) -> Self {
        Self::from_i128(n).expect("i128 converts to every float type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
