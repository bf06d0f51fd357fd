//! Scalar abstractions shared by the closed-form probability code and the
//! information-theoretic scores.
//!
//! [`Probability`] only needs field arithmetic, so it is satisfied by exact
//! rationals as well as floats. [`Real`] adds logarithms and powers.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num};

/// A number type that can carry probability masses under `+ - * /`.
pub trait Probability:
    Copy + Num + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }
}

impl Probability for f32 {}
impl Probability for f64 {}
impl Probability for Ratio<i64> {}
impl Probability for Ratio<i128> {}

/// Floating point scalar used where logarithms or fractional powers appear.
pub trait Real: Probability + Float {
    /// Base-2 logarithm with the `0 · log 0 = 0` convention folded in by callers.
    fn log2_ratio(num: Self, den: Self) -> Self {
        (num / den).log2()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Sum with Neumaier compensation. Normalization checks are pinned at 1e-12,
/// which plain summation over large vocabularies does not reliably meet.
pub fn compensated_sum<S: Real>(values: impl IntoIterator<Item = S>) -> S {
    let mut sum = S::zero();
    let mut carry = S::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut v = vec![1.0f64];
        v.extend(std::iter::repeat_n(1e-16, 10_000));
        let s = compensated_sum(v.iter().copied());
        assert!((s - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn rationals_are_probabilities() {
        let third = Ratio::<i64>::one() / Ratio::from_count(3);
        assert_eq!(third + third + third, Ratio::one());
    }
}
