use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
///
/// Serializes as the string `"num/den"` (or `"num"` when the denominator is 1).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Domain("rational with zero denominator".into()));
        }
        Ok(Self(BigRational::new(num.into(), den)))
    }

    /// Panics on a zero denominator; meant for literals.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Self(self.0.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(Self(&self.0 / &other.0))
    }

    /// `self^e`; numerator and denominator stay coprime, so no reduction is needed.
    pub fn pow(&self, e: u64) -> Self {
        let e = u32::try_from(e).expect("exponent fits in u32");
        let n = num_traits::Pow::pow(self.0.numer(), e);
        let d = num_traits::Pow::pow(self.0.denom(), e);
        Self(BigRational::new_raw(n, d))
    }

    /// Bit length of numerator plus denominator; a size proxy for budget guards.
    pub fn bits(&self) -> u64 {
        self.0.numer().bits() + self.0.denom().bits()
    }

    /// Nearest-ish f64. Handles magnitudes far outside the f64 exponent range by
    /// shifting before dividing (very small values flush to 0).
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() && (v != 0.0 || self.is_zero()) {
                return v;
            }
        }
        // bring both sides down to 64 significant bits, divide, then rescale
        let n = self.0.numer();
        let (a, sa) = top_bits(n.magnitude(), 64);
        let (b, sb) = top_bits(self.0.denom().magnitude(), 64);
        let sign = if n.is_negative() { -1.0 } else { 1.0 };
        sign * scale_pow2(a / b, sa - sb)
    }

    /// Exact conversion of a finite f64.
    pub fn from_f64(v: f64) -> Result<Self> {
        BigRational::from_float(v)
            .map(Self)
            .ok_or_else(|| Error::Domain(format!("non-finite value {v}")))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self { other } else { self }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self { other } else { self }
    }
}

/// `m ≈ mantissa · 2^shift` with the mantissa holding at most `keep` bits.
fn top_bits(m: &BigUint, keep: u64) -> (f64, i64) {
    let b = m.bits();
    if b <= keep {
        return (m.to_f64().unwrap_or(0.0), 0);
    }
    let t: BigUint = m >> (b - keep);
    (t.to_f64().unwrap_or(0.0), (b - keep) as i64)
}

fn scale_pow2(q: f64, e: i64) -> f64 {
    let mut v = q;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Self::new(n, d);
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Self::from_integer(n));
        }
        // decimal literal like 0.37 is read exactly as 37/100
        if let Some((ip, fp)) = s.split_once('.') {
            if !fp.is_empty() && fp.chars().all(|c| c.is_ascii_digit()) {
                let neg = ip.starts_with('-');
                let ip_abs = ip.trim_start_matches(['-', '+']);
                let whole: BigInt = if ip_abs.is_empty() { BigInt::zero() } else { ip_abs.parse().map_err(|_| bad())? };
                let frac: BigInt = fp.parse().map_err(|_| bad())?;
                let scale = BigInt::from(10u32).pow(fp.len() as u32);
                let mag = whole * &scale + frac;
                return Self::new(if neg { -mag } else { mag }, scale);
            }
        }
        Err(bad())
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<u64> for ExactRational {
    fn from(v: u64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigRational> for ExactRational {
    fn from(v: BigRational) -> Self {
        Self(v)
    }
}

impl PartialEq<i64> for ExactRational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer((*other).into())
    }
}

impl PartialOrd<i64> for ExactRational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(&BigRational::from_integer((*other).into()))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(self.0.$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
        impl $atr for ExactRational {
            fn $am(&mut self, rhs: ExactRational) {
                self.0.$am(rhs.0);
            }
        }
        impl<'a> $atr<&'a ExactRational> for ExactRational {
            fn $am(&mut self, rhs: &'a ExactRational) {
                self.0.$am(&rhs.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

/// Panics on division by zero, like integer division. Use [`ExactRational::checked_div`]
/// when the divisor is data-dependent.
impl Div for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &'a ExactRational) -> ExactRational {
        ExactRational(&self.0 / &rhs.0)
    }
}

impl<'a> Div<&'a ExactRational> for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &'a ExactRational) -> ExactRational {
        ExactRational(self.0 / &rhs.0)
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a ExactRational> for ExactRational {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}
