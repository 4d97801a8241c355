use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A real known up to an absolute error radius: the true value lies in
/// `[mid - radius, mid + radius]`.
///
/// Arithmetic widens the radius by the propagated error plus one ulp-scale
/// rounding allowance per operation, so enclosures stay valid in f64.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundedReal {
    pub mid: f64,
    pub radius: f64,
}

const ROUND: f64 = 2.0 * f64::EPSILON;

impl ErrorBoundedReal {
    pub fn exact(v: f64) -> Self {
        Self { mid: v, radius: 0.0 }
    }

    pub fn new(mid: f64, radius: f64) -> Self {
        Self { mid, radius: radius.abs() }
    }

    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mid = 0.5 * (lo + hi);
        Self { mid, radius: (0.5 * (hi - lo)) * (1.0 + ROUND) + ROUND * mid.abs() }
    }

    pub fn lo(&self) -> f64 {
        self.mid - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.mid + self.radius
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo() <= v && v <= self.hi()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }

    pub fn widen(self, extra: f64) -> Self {
        Self { mid: self.mid, radius: self.radius + extra.abs() }
    }

    pub fn recip(self) -> Option<Self> {
        let lo = self.lo();
        let hi = self.hi();
        if lo <= 0.0 && hi >= 0.0 {
            return None;
        }
        Some(Self::from_bounds(1.0 / hi, 1.0 / lo))
    }

    pub fn div(self, other: Self) -> Option<Self> {
        other.recip().map(|r| self * r)
    }
}

impl fmt::Debug for ErrorBoundedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.mid, self.radius)
    }
}

impl Add for ErrorBoundedReal {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mid = self.mid + o.mid;
        Self { mid, radius: self.radius + o.radius + ROUND * mid.abs() }
    }
}

impl Sub for ErrorBoundedReal {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mid = self.mid - o.mid;
        Self { mid, radius: self.radius + o.radius + ROUND * mid.abs() }
    }
}

impl Mul for ErrorBoundedReal {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mid = self.mid * o.mid;
        let radius = self.mid.abs() * o.radius + o.mid.abs() * self.radius + self.radius * o.radius;
        Self { mid, radius: radius + ROUND * mid.abs() }
    }
}

impl Neg for ErrorBoundedReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self { mid: -self.mid, radius: self.radius }
    }
}
