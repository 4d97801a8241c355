use std::fmt;

use serde::{Serialize, Serializer};

use super::rational::ExactRational;

/// Univariate polynomial with exact coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly(Vec<ExactRational>);

impl Poly {
    pub fn constant(c: ExactRational) -> Self {
        let mut p = Self(vec![c]);
        p.trim();
        p
    }

    /// `c0 + c1 * u`.
    pub fn linear(c0: ExactRational, c1: ExactRational) -> Self {
        let mut p = Self(vec![c0, c1]);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.0
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.0.get(k).cloned().unwrap_or_else(ExactRational::zero);
            let b = o.0.get(k).cloned().unwrap_or_else(ExactRational::zero);
            v.push(a + b);
        }
        let mut p = Self(v);
        p.trim();
        p
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        let mut p = Self(self.0.iter().map(|a| a * c).collect());
        p.trim();
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut v = vec![ExactRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        let mut p = Self(v);
        p.trim();
        p
    }

    pub fn eval_f64(&self, u: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * u + c.to_f64())
    }

    pub fn eval(&self, u: &ExactRational) -> ExactRational {
        self.0.iter().rev().fold(ExactRational::zero(), |acc, c| acc * u + c)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})u"),
                _ => format!("({c})u^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Ratio of polynomials in one formal symbol `u`, standing for a neighborhood
/// mass that is known only through an enclosure. Exact kernel entries whose
/// normalizer contains such a remainder live in this field.
#[derive(Clone)]
pub struct SymbolicRational {
    pub num: Poly,
    pub den: Poly,
}

impl SymbolicRational {
    pub fn constant(c: ExactRational) -> Self {
        Self { num: Poly::constant(c), den: Poly::constant(ExactRational::one()) }
    }

    pub fn zero() -> Self {
        Self::constant(ExactRational::zero())
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "symbolic rational with zero denominator");
        Self { num, den }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Self::new(self.num.scale(c), self.den.clone())
    }

    /// The value as a plain rational when it does not depend on `u`.
    pub fn as_constant(&self) -> Option<ExactRational> {
        if self.num.is_zero() {
            return Some(ExactRational::zero());
        }
        let dn = self.num.degree()?;
        let dd = self.den.degree()?;
        if dn != dd {
            return None;
        }
        let c = &self.num.coeffs()[dn] / &self.den.coeffs()[dd];
        if self.den.scale(&c) == self.num { Some(c) } else { None }
    }

    /// Exact equality as rational functions (cross-multiplication).
    pub fn same_as(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    pub fn is_symbolic(&self) -> bool {
        self.as_constant().is_none()
    }

    pub fn eval_f64(&self, u: f64) -> f64 {
        self.num.eval_f64(u) / self.den.eval_f64(u)
    }

    pub fn eval(&self, u: &ExactRational) -> Option<ExactRational> {
        let d = self.den.eval(u);
        self.num.eval(u).checked_div(&d).ok()
    }
}

impl PartialEq for SymbolicRational {
    fn eq(&self, o: &Self) -> bool {
        self.same_as(o)
    }
}

impl fmt::Debug for SymbolicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_constant() {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "[{:?}] / [{:?}]", self.num, self.den),
        }
    }
}

impl fmt::Display for SymbolicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for SymbolicRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
