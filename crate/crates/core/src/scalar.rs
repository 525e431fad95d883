//! The score scalar abstraction.
//!
//! Every accuracy score in this crate is a ratio of two integer counts, so
//! the score type only needs field arithmetic, ordering, and conversions
//! from counts. `f32`/`f64` are what reports use; `Rational64` and
//! `BigRational` keep the arithmetic exact, which the test suites rely on
//! when an expected value is a literal fraction.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type accuracy scores are computed in.
pub trait Scalar:
    Num + Signed + FromPrimitive + ToPrimitive + PartialOrd + Clone + Debug + Display
{
    /// Lifts a count (a sequence length or an error tally) into the scalar.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in score scalar")
    }

    /// The exact quotient of two integers. `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "ratio denominator must be non-zero");
        Self::from_i64(num).expect("numerator representable")
            / Self::from_i64(den).expect("denominator representable")
    }

    /// Clamps into `[0, 1]`.
    fn clamp_unit(self) -> Self {
        if self < Self::zero() {
            Self::zero()
        } else if self > Self::one() {
            Self::one()
        } else {
            self
        }
    }

    /// Lossy view for rendering; scores always fit comfortably in an `f64`.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for Rational64 {}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "ratio denominator must be non-zero");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Unweighted mean, or `None` for an empty iterator.
pub fn mean<S: Scalar>(values: impl IntoIterator<Item = S>) -> Option<S> {
    let mut sum = S::zero();
    let mut count = 0usize;
    for v in values {
        sum = sum + v;
        count += 1;
    }
    if count == 0 {
        None
    } else {
        Some(sum / S::from_count(count))
    }
}
