use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{partition_log_upper, partition_numbers, ErrorBoundedReal, MAX_PARTITION_INDEX};

use super::oracle::GraphOracle;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventBReport {
    pub n_max: u64,
    pub holds: bool,
    /// Vertices in `[1, n_max]` with no smaller neighbor.
    pub violations: Vec<u64>,
}

/// Whether every `x` in `[1, n_max]` has a neighbor below it.
pub fn check_event_b(g: &GraphOracle, n_max: u64) -> EventBReport {
    let violations: Vec<u64> = (1..=n_max).filter(|&x| !(0..x).any(|y| g.adjacent(x, y))).collect();
    EventBReport { n_max, holds: violations.is_empty(), violations }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbBEstimate {
    pub p: f64,
    pub n_max: u64,
    pub samples: u64,
    /// Fraction of seeds on which the event held on `[1, n_max]`.
    pub estimate: f64,
    pub std_err: f64,
    /// Infinite product over all `x >= 1`, with its truncation enclosure.
    pub product: ErrorBoundedReal,
    /// Reciprocal of the partition generating series, with its tail enclosure.
    pub series: ErrorBoundedReal,
    /// Exact probability of the event restricted to `[1, n_max]`.
    pub finite_product: f64,
    /// `|estimate - finite_product|` in standard errors.
    pub z_score: f64,
}

/// `prod_{x >= 1} (1 - (1-p)^x)` enclosed by `prod_{x <= X}` and `1 - sum_{x > X} q^x`.
pub fn prob_b_product(p: f64) -> Result<ErrorBoundedReal> {
    check_p(p)?;
    let q = 1.0 - p;
    let mut prod = 1.0;
    let mut qx = q;
    let mut x = 1u64;
    let mut rounding = 0.0;
    // stop once the remaining factors can move the product by less than 1e-17
    while qx / p > 1e-17 {
        prod *= 1.0 - qx;
        rounding += 2.0 * f64::EPSILON;
        qx *= q;
        x += 1;
        if x > 1_000_000 {
            return Err(Error::BudgetExhausted { what: "product factors".into(), budget: 1_000_000 });
        }
    }
    // remaining factors lie in [1 - qx/p, 1]
    let tail = qx / p;
    let lo = prod * (1.0 - tail) * (1.0 - rounding);
    let hi = prod * (1.0 + rounding);
    Ok(ErrorBoundedReal::from_bounds(lo, hi))
}

/// `(sum_n p(n) q^n)^{-1}` with the tail bounded through `p(n) < exp(pi sqrt(2n/3))`.
pub fn prob_b_series(p: f64) -> Result<ErrorBoundedReal> {
    check_p(p)?;
    let q = 1.0 - p;
    let ln_q = q.ln();
    let table = partition_numbers(MAX_PARTITION_INDEX)?;
    let mut sum = 0.0;
    for (n, pn) in table.iter().enumerate() {
        let ln_pn = big_ln(pn);
        let term = (ln_pn + n as f64 * ln_q).exp();
        sum += term;
        if n < 2 {
            continue;
        }
        // dominating terms e^{pi sqrt(2m/3)} q^m for m > n have ratio at most e^{pi/sqrt(6n)} q
        let ratio = (std::f64::consts::PI / (6.0 * n as f64).sqrt()).exp() * q;
        if ratio < 1.0 {
            let next = ((partition_log_upper((n + 1) as f64)) + (n + 1) as f64 * ln_q).exp();
            let tail = next / (1.0 - ratio);
            if tail < 1e-16 * sum {
                let rounding = sum * (n as f64) * f64::EPSILON;
                let lo = 1.0 / (sum + tail + rounding);
                let hi = 1.0 / (sum - rounding);
                return Ok(ErrorBoundedReal::from_bounds(lo, hi));
            }
        }
    }
    Err(Error::BudgetExhausted { what: "partition series did not converge".into(), budget: MAX_PARTITION_INDEX as u64 })
}

fn big_ln(v: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: num_bigint::BigUint = v >> shift;
    top.to_f64().unwrap_or(0.0).ln() + shift as f64 * std::f64::consts::LN_2
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("edge probability must be in (0,1), got {p}")));
    }
    Ok(())
}

/// Monte Carlo over seeds `0..samples`, compared with the finite product on `[1, n_max]`.
pub fn estimate_prob_b(p: f64, n_max: u64, samples: u64) -> Result<ProbBEstimate> {
    check_p(p)?;
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let hits = count_hits(p, n_max, samples)?;
    let estimate = hits as f64 / samples as f64;
    let q = 1.0 - p;
    let finite_product: f64 = (1..=n_max).map(|x| 1.0 - q.powf(x as f64)).product();
    let std_err = (finite_product * (1.0 - finite_product) / samples as f64).sqrt();
    let z_score = if std_err > 0.0 { (estimate - finite_product).abs() / std_err } else { 0.0 };
    Ok(ProbBEstimate {
        p,
        n_max,
        samples,
        estimate,
        std_err,
        product: prob_b_product(p)?,
        series: prob_b_series(p)?,
        finite_product,
        z_score,
    })
}

#[cfg(feature = "parallel")]
fn count_hits(p: f64, n_max: u64, samples: u64) -> Result<u64> {
    use rayon::prelude::*;
    (0..samples)
        .into_par_iter()
        .map(|seed| GraphOracle::random(p, seed).map(|g| u64::from(check_event_b(&g, n_max).holds)))
        .sum()
}

#[cfg(not(feature = "parallel"))]
fn count_hits(p: f64, n_max: u64, samples: u64) -> Result<u64> {
    let mut hits = 0;
    for seed in 0..samples {
        hits += u64::from(check_event_b(&GraphOracle::random(p, seed)?, n_max).holds);
    }
    Ok(hits)
}
