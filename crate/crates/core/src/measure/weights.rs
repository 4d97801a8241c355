use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{exact_power, zeta, ErrorBoundedReal, ExactRational};

/// Summable weight `Q` on the naturals.
#[derive(Clone, PartialEq)]
pub enum WeightFamily {
    /// `Q(x) = delta^x`.
    Geometric { delta: ExactRational, delta_f64: f64 },
    /// `Q(x) = 1 / (zeta(l) (x+1)^l)`.
    Polynomial { exponent: f64, zeta: ErrorBoundedReal },
}

/// Terms summed before the integral bracket closes `zeta`.
const ZETA_TERMS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum WeightValue {
    Exact(ExactRational),
    Approx(ErrorBoundedReal),
}

impl WeightValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            WeightValue::Exact(r) => r.to_f64(),
            WeightValue::Approx(e) => e.mid,
        }
    }
}

impl WeightFamily {
    pub fn geometric(delta: ExactRational) -> Result<Self> {
        if !(delta.is_positive() && delta < ExactRational::one()) {
            return Err(Error::Domain(format!("geometric weight needs delta in (0,1), got {delta}")));
        }
        let delta_f64 = delta.to_f64();
        Ok(Self::Geometric { delta, delta_f64 })
    }

    pub fn half() -> Self {
        Self::geometric(ExactRational::ratio(1, 2)).expect("1/2 is valid")
    }

    pub fn polynomial(exponent: f64) -> Result<Self> {
        let zeta = zeta(exponent, ZETA_TERMS)?;
        Ok(Self::Polynomial { exponent, zeta })
    }

    pub fn delta(&self) -> Option<&ExactRational> {
        match self {
            Self::Geometric { delta, .. } => Some(delta),
            Self::Polynomial { .. } => None,
        }
    }

    pub fn require_delta(&self) -> Result<&ExactRational> {
        self.delta().ok_or_else(|| Error::Domain("operation needs geometric weights".into()))
    }

    pub fn delta_f64(&self) -> Option<f64> {
        match self {
            Self::Geometric { delta_f64, .. } => Some(*delta_f64),
            Self::Polynomial { .. } => None,
        }
    }

    pub fn q(&self, x: u64) -> Result<WeightValue> {
        match self {
            Self::Geometric { delta, .. } => Ok(WeightValue::Exact(exact_power(delta, x)?)),
            Self::Polynomial { exponent, zeta } => {
                let base = ((x as f64) + 1.0).powf(-exponent);
                let v = ErrorBoundedReal::exact(base).widen(base * 4.0 * f64::EPSILON);
                Ok(WeightValue::Approx(v.div(*zeta).expect("zeta is positive")))
            }
        }
    }

    pub fn q_exact(&self, x: u64) -> Result<ExactRational> {
        exact_power(self.require_delta()?, x)
    }

    pub fn q_f64(&self, x: u64) -> f64 {
        self.ln_q(x).exp()
    }

    pub fn ln_q(&self, x: u64) -> f64 {
        match self {
            Self::Geometric { delta_f64, .. } => x as f64 * delta_f64.ln(),
            Self::Polynomial { exponent, zeta } => -exponent * ((x as f64) + 1.0).ln() - zeta.mid.ln(),
        }
    }

    /// `sum_x Q(x)`.
    pub fn total_mass_f64(&self) -> f64 {
        match self {
            Self::Geometric { delta_f64, .. } => 1.0 / (1.0 - delta_f64),
            Self::Polynomial { .. } => 1.0,
        }
    }

    /// Upper bound on `sum_{x > n} Q(x)`.
    pub fn tail_f64(&self, n: u64) -> f64 {
        match self {
            Self::Geometric { delta_f64, .. } => ((n + 1) as f64 * delta_f64.ln()).exp() / (1.0 - delta_f64),
            Self::Polynomial { exponent, zeta } => {
                // sum_{x > n} (x+1)^{-l} <= integral from n+1 of t^{-l}
                ((n + 1) as f64).powf(1.0 - exponent) / (exponent - 1.0) / zeta.lo()
            }
        }
    }

    /// Smallest `h` with `Q(h) / Q(0)` below the f64 underflow threshold.
    pub fn float_horizon(&self) -> u64 {
        match self {
            Self::Geometric { delta_f64, .. } => (745.0 / -delta_f64.ln()).ceil() as u64,
            Self::Polynomial { exponent, .. } => (745.0 / exponent).exp().min(1e15) as u64,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Geometric { delta, .. } => format!("geometric({delta})"),
            Self::Polynomial { exponent, .. } => format!("polynomial({exponent})"),
        }
    }
}

impl fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for WeightFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.label())
    }
}

impl std::str::FromStr for WeightFamily {
    type Err = Error;
    /// `geometric:1/2`, `geometric:0.9`, `polynomial:2`, or a bare rational meaning geometric.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("polynomial:") {
            let l: f64 = rest.parse().map_err(|_| Error::Parse(format!("bad exponent {rest:?}")))?;
            return Self::polynomial(l);
        }
        let rest = s.strip_prefix("geometric:").unwrap_or(s);
        Self::geometric(rest.parse()?)
    }
}
