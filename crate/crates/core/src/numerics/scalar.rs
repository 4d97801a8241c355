use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::rational::ExactRational;

/// Field operations shared by `f64` and [`ExactRational`], so generators and
/// tree functionals can run in either mode.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_exact() -> bool;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() { -self.clone() } else { self.clone() }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a { b } else { a }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a { b } else { a }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for ExactRational {
    fn zero() -> Self {
        ExactRational::zero()
    }
    fn one() -> Self {
        ExactRational::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        ExactRational::ratio(num, den)
    }
    fn to_f64(&self) -> f64 {
        ExactRational::to_f64(self)
    }
    fn is_exact() -> bool {
        true
    }
    fn is_zero(&self) -> bool {
        ExactRational::is_zero(self)
    }
}
