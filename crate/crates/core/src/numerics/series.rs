use crate::error::{Error, Result};

use super::interval::ErrorBoundedReal;
use super::rational::ExactRational;

/// Largest exact power `delta^m` we will build, measured in bits of the result.
pub const EXACT_BIT_BUDGET: u64 = 1 << 22;

/// `delta^m` exactly, refusing results larger than [`EXACT_BIT_BUDGET`].
pub fn exact_power(delta: &ExactRational, m: u64) -> Result<ExactRational> {
    let per = delta.bits().max(1) as u128;
    if per * m as u128 > EXACT_BIT_BUDGET as u128 {
        return Err(Error::Overflow(format!("delta^{m} exceeds the exact bit budget")));
    }
    Ok(delta.pow(m))
}

/// `sum over j with bit i of j set of delta^j = delta^{2^i} / ((1 - delta)(1 + delta^{2^i}))`.
pub fn block_mass_exact(delta: &ExactRational, i: u32) -> Result<ExactRational> {
    if i >= 64 {
        return Err(Error::Overflow(format!("block {i} starts beyond 2^63")));
    }
    let t = exact_power(delta, 1u64 << i)?;
    let one = ExactRational::one();
    let den = (&one - delta) * (&one + &t);
    t.checked_div(&den)
}

pub fn block_mass_f64(delta: f64, i: u32) -> f64 {
    let t = pow2_power(delta, i);
    t / ((1.0 - delta) * (1.0 + t))
}

/// `delta^{2^i}` in f64 by repeated squaring (underflows cleanly to 0).
pub fn pow2_power(delta: f64, i: u32) -> f64 {
    let mut t = delta;
    for _ in 0..i {
        t *= t;
        if t == 0.0 {
            break;
        }
    }
    t
}

/// `sum over j with bit i of j set of 2^{-(j+1)}`; `i = 0` gives 1/3.
pub fn geometric_block_sum(i: u32) -> Result<ExactRational> {
    Ok(block_mass_exact(&ExactRational::ratio(1, 2), i)? * ExactRational::ratio(1, 2))
}

/// `sum_{j > n} delta^j = delta^{n+1} / (1 - delta)`.
pub fn geometric_tail_exact(delta: &ExactRational, n: u64) -> Result<ExactRational> {
    let num = exact_power(delta, n + 1)?;
    num.checked_div(&(ExactRational::one() - delta))
}

pub fn geometric_tail_f64(delta: f64, n: u64) -> f64 {
    (((n + 1) as f64) * delta.ln()).exp() / (1.0 - delta)
}

/// `zeta(l)` from a partial sum over `n <= terms` and the integral bracket for the rest.
pub fn zeta(l: f64, terms: u64) -> Result<ErrorBoundedReal> {
    if !(l > 1.0) {
        return Err(Error::Domain(format!("zeta needs exponent > 1, got {l}")));
    }
    let terms = terms.max(1);
    // sum smallest terms first
    let partial: f64 = (1..=terms).rev().map(|n| (n as f64).powf(-l)).sum();
    let lo = ((terms + 1) as f64).powf(1.0 - l) / (l - 1.0);
    let hi = (terms as f64).powf(1.0 - l) / (l - 1.0);
    let rounding = partial * (terms as f64) * f64::EPSILON;
    Ok(ErrorBoundedReal::from_bounds(partial + lo - rounding, partial + hi + rounding))
}
