use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping threshold for iterated logarithms when the base exceeds `e^{1/e}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogStarConvention {
    /// Stop once the iterate is `<= 0`.
    Nonpositive,
    /// Stop once the iterate is `<= 1`.
    #[default]
    AtMostOne,
}

impl std::str::FromStr for LogStarConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonpositive" => Ok(Self::Nonpositive),
            "at-most-one" => Ok(Self::AtMostOne),
            _ => Err(Error::Parse(format!("unknown log* convention {s:?}"))),
        }
    }
}

/// `e^{1/e}`, the largest base for which `log_a` has real fixed points.
pub fn critical_base() -> f64 {
    E.powf(1.0 / E)
}

/// Relative slack used when comparing an iterate with the larger fixed point.
/// Iterates started above `x_a` approach it from above without reaching it,
/// so the count is taken to the point where they are within this slack.
pub const FIXED_POINT_SLACK: f64 = 1e-12;

const MAX_ITERATIONS: u32 = 1 << 20;

/// Iterated logarithm base `a`: number of applications of `log_a` needed to
/// bring `x` to the stopping threshold.
pub fn log_star(x: f64, a: f64, convention: LogStarConvention) -> Result<u32> {
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::Domain(format!("log* base must exceed 1, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("log* argument must be nonnegative, got {x}")));
    }
    if x == 0.0 {
        return Ok(0);
    }
    let log2_a = a.log2();
    let threshold = if a <= critical_base() + 1e-15 {
        let (_, xa) = fixed_points(a.min(critical_base()))?;
        xa * (1.0 + FIXED_POINT_SLACK)
    } else {
        match convention {
            LogStarConvention::Nonpositive => 0.0,
            LogStarConvention::AtMostOne => 1.0,
        }
    };
    let mut v = x;
    let mut n = 0u32;
    while v > threshold {
        if x.is_infinite() && n == 0 {
            return Err(Error::Domain("log* of infinity".into()));
        }
        v = if v > 0.0 { v.log2() / log2_a } else { f64::NEG_INFINITY };
        n += 1;
        if n > MAX_ITERATIONS {
            return Err(Error::BudgetExhausted { what: "log* iteration".into(), budget: MAX_ITERATIONS as u64 });
        }
    }
    Ok(n)
}

/// `log_star(2^e, a, convention)` without materializing `2^e`.
pub fn log_star_pow2(e: f64, a: f64, convention: LogStarConvention) -> Result<u32> {
    if e.is_nan() {
        return Err(Error::Domain("log* exponent is NaN".into()));
    }
    if e < 1000.0 {
        return log_star(e.exp2(), a, convention);
    }
    // 2^e is far above every threshold, so one application is certain
    Ok(1 + log_star(e / a.log2(), a, convention)?)
}

/// Both solutions `y_a <= x_a` of `log_a r = r` for `1 < a <= e^{1/e}`.
pub fn fixed_points(a: f64) -> Result<(f64, f64)> {
    let crit = critical_base();
    if !(a > 1.0) {
        return Err(Error::Domain(format!("fixed points need a > 1, got {a}")));
    }
    if (a - crit).abs() <= 1e-15 {
        return Ok((E, E));
    }
    if a > crit {
        return Err(Error::Domain(format!("log_a has no fixed point for a = {a} > e^(1/e)")));
    }
    let ln_a = a.ln();
    // h(r) = ln r / r - ln a: increasing on (1, e), decreasing on (e, inf)
    let h = |r: f64| r.ln() / r - ln_a;
    let low = bisect(h, 1.0, E);
    let mut hi = 2.0 * E;
    while h(hi) > 0.0 {
        hi *= 2.0;
    }
    let high = bisect(h, E, hi);
    Ok((low, high))
}

/// Root of `f` on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs,
/// bisected to adjacent floats.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo_neg = f(lo) < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == flo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual of the fixed-point equation
    if f(lo).abs() <= f(hi).abs() { lo } else { hi }
}

/// `|log_a r - r|`, the residual of the fixed-point equation.
pub fn fixed_point_residual(a: f64, r: f64) -> f64 {
    (r.ln() / a.ln() - r).abs()
}
