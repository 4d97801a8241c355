use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GraphOracle;
use crate::numerics::{exact_power, ExactRational, Scalar};

use super::neighborhood::{q_neighborhood_exact, q_neighborhood_f64, NeighborhoodMode};
use super::weights::{WeightFamily, WeightValue};

/// Extra neighbors scanned past the cap when `Q(N(i))` has no closed form.
const EXACT_TRUNCATION_MARGIN: u64 = 64;

/// Unnormalized stationary weights `w(i) = Q(i) Q(N(i))` on `[0, cap]`, each
/// enclosed in `[weights_lo, weights_hi]`, with bounds on the normalizer `Z`.
#[derive(Debug, Clone, Serialize)]
pub struct StationaryResult<T> {
    pub cap: u64,
    pub weights_lo: Vec<T>,
    pub weights_hi: Vec<T>,
    pub z_lower: T,
    pub z_upper: T,
    /// Upper bound on `sum_{i > cap} w(i)`, using `Q(N(i)) <= sum_j Q(j) - Q(i)`.
    pub tail_bound: T,
}

impl<T: Scalar> StationaryResult<T> {
    /// `[w_lo(i) / Z_upper, w_hi(i) / Z_lower]`.
    pub fn pi_interval(&self, i: usize) -> (T, T) {
        (
            self.weights_lo[i].clone() / self.z_upper.clone(),
            self.weights_hi[i].clone() / self.z_lower.clone(),
        )
    }

    pub fn pi_lower(&self) -> Vec<T> {
        self.weights_lo.iter().map(|w| w.clone() / self.z_upper.clone()).collect()
    }
}

fn check_cap(cap: u64) -> Result<()> {
    if cap < 1 {
        return Err(Error::Domain("stationary measure needs cap >= 1".into()));
    }
    Ok(())
}

/// Exact enclosure; geometric weights only.
pub fn stationary_exact(g: &GraphOracle, w: &WeightFamily, cap: u64) -> Result<StationaryResult<ExactRational>> {
    check_cap(cap)?;
    let delta = w.require_delta()?.clone();
    let mode = if g.is_binary() {
        NeighborhoodMode::ClosedForm
    } else {
        NeighborhoodMode::Truncated { cap: cap + EXACT_TRUNCATION_MARGIN }
    };
    let mut lo = Vec::with_capacity(cap as usize + 1);
    let mut hi = Vec::with_capacity(cap as usize + 1);
    let mut qi = ExactRational::one();
    for i in 0..=cap {
        let n = q_neighborhood_exact(g, w, i, mode)?;
        hi.push(&qi * &n.upper());
        lo.push(&qi * &n.known);
        qi *= &delta;
    }
    let one = ExactRational::one();
    let total = one.checked_div(&(&one - &delta))?;
    let first = exact_power(&delta, cap + 1)?;
    // sum_{i > cap} delta^i (T - delta^i) = T delta^{c+1} / (1-delta) - delta^{2(c+1)} / (1-delta^2)
    let tail_bound = (&total * &first).checked_div(&(&one - &delta))?
        - (&first * &first).checked_div(&(&one - &(&delta * &delta)))?;
    let z_lower: ExactRational = lo.iter().sum();
    let z_upper: ExactRational = hi.iter().sum::<ExactRational>() + &tail_bound;
    Ok(StationaryResult { cap, weights_lo: lo, weights_hi: hi, z_lower, z_upper, tail_bound })
}

/// Float enclosure (rounding is not tracked beyond a few ulps).
pub fn stationary(g: &GraphOracle, w: &WeightFamily, cap: u64) -> Result<StationaryResult<f64>> {
    check_cap(cap)?;
    let closed = g.is_binary() && w.delta().is_some();
    let horizon = cap.saturating_add(w.float_horizon().min(1 << 16));
    let mode = if closed { NeighborhoodMode::ClosedForm } else { NeighborhoodMode::Truncated { cap: horizon } };
    let mut lo = Vec::with_capacity(cap as usize + 1);
    let mut hi = Vec::with_capacity(cap as usize + 1);
    for i in 0..=cap {
        let n = q_neighborhood_f64(g, w, i, mode)?;
        let qi = w.q_f64(i);
        lo.push(qi * n.known * (1.0 - 4.0 * f64::EPSILON));
        hi.push(qi * n.upper() * (1.0 + 4.0 * f64::EPSILON));
    }
    let tail_bound = match w.delta_f64() {
        Some(d) => {
            let first = ((cap + 1) as f64 * d.ln()).exp();
            w.total_mass_f64() * first / (1.0 - d) - first * first / (1.0 - d * d)
        }
        None => w.tail_f64(cap) * w.total_mass_f64(),
    };
    let z_lower: f64 = lo.iter().rev().sum::<f64>() * (1.0 - (cap as f64 + 2.0) * f64::EPSILON);
    let z_upper: f64 = (hi.iter().rev().sum::<f64>() + tail_bound) * (1.0 + (cap as f64 + 2.0) * f64::EPSILON);
    Ok(StationaryResult { cap, weights_lo: lo, weights_hi: hi, z_lower, z_upper, tail_bound })
}

/// `mu(x) = Q(x) Q(parent(x))`.
pub fn mu_vertex(g: &GraphOracle, w: &WeightFamily, x: u64) -> Result<WeightValue> {
    if x == 0 {
        return Err(Error::Domain("mu is defined on non-root vertices".into()));
    }
    let p = g.parent(x)?;
    match (w.q(x)?, w.q(p)?) {
        (WeightValue::Exact(a), WeightValue::Exact(b)) => Ok(WeightValue::Exact(a * b)),
        (a, b) => {
            let to_iv = |v: WeightValue| match v {
                WeightValue::Exact(r) => crate::numerics::ErrorBoundedReal::exact(r.to_f64()),
                WeightValue::Approx(e) => e,
            };
            Ok(WeightValue::Approx(to_iv(a) * to_iv(b)))
        }
    }
}

pub fn mu_vertex_f64(g: &GraphOracle, w: &WeightFamily, x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::Domain("mu is defined on non-root vertices".into()));
    }
    Ok((w.ln_q(x) + w.ln_q(g.parent(x)?)).exp())
}

/// Weight of the tree edge `{x, parent(x)}`; the same number as [`mu_vertex`].
pub fn nu_edge(g: &GraphOracle, w: &WeightFamily, x: u64) -> Result<WeightValue> {
    mu_vertex(g, w, x)
}

pub fn nu_edge_f64(g: &GraphOracle, w: &WeightFamily, x: u64) -> Result<f64> {
    mu_vertex_f64(g, w, x)
}
