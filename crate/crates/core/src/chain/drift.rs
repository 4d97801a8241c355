use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GraphOracle;
use crate::measure::{q_neighborhood_exact, q_neighborhood_f64, NeighborhoodMode, WeightFamily};
use crate::numerics::{log_star, log_star_pow2, ExactRational, LogStarConvention};

/// `E(e^{Z_1 - Z_0} | X_0 = j)` with `Z = log*_a`, split into the part computed on
/// the window and a rigorous allowance for neighbors past it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftEstimate {
    pub j: u64,
    pub window_part: f64,
    pub tail_allowance: f64,
    pub upper: f64,
    /// `P(X_1 > parent(j) | X_0 = j)`.
    pub prob_above_parent: f64,
}

/// `(3 + 2/e) / 4`, the large-`j` ceiling the drift argument establishes.
pub fn drift_ceiling() -> f64 {
    (3.0 + 2.0 * (-1.0f64).exp()) / 4.0
}

/// Shared tables for many drift evaluations on one window.
pub struct DriftContext {
    g: GraphOracle,
    w: WeightFamily,
    delta: f64,
    base: f64,
    convention: LogStarConvention,
    /// Neighbors up to here are summed; the rest go into the allowance.
    limit: u64,
    q: Vec<f64>,
    log_star_table: Vec<u32>,
}

impl DriftContext {
    pub fn new(g: &GraphOracle, w: &WeightFamily, cap: u64, base: f64, convention: LogStarConvention) -> Result<Self> {
        let delta = w.delta_f64().ok_or_else(|| Error::Domain("drift needs geometric weights".into()))?;
        let limit = cap.min(w.float_horizon());
        let q: Vec<f64> = (0..=limit).map(|j| w.q_f64(j)).collect();
        let log_star_table = (0..=limit).map(|l| log_star(l as f64, base, convention)).collect::<Result<Vec<_>>>()?;
        Ok(Self { g: g.clone(), w: w.clone(), delta, base, convention, limit, q, log_star_table })
    }

    fn ls(&self, l: u64) -> Result<u32> {
        match self.log_star_table.get(l as usize) {
            Some(&v) => Ok(v),
            None => log_star(l as f64, self.base, self.convention),
        }
    }

    /// Lower bound on `Q(N(j))`, so that `Q(l) / L` over-estimates each kernel entry.
    fn neighborhood_lower(&self, j: u64) -> Result<f64> {
        if self.g.is_binary() {
            Ok(q_neighborhood_f64(&self.g, &self.w, j, NeighborhoodMode::ClosedForm)?.known)
        } else {
            let h = j.max(self.limit).saturating_add(self.w.float_horizon());
            Ok(q_neighborhood_f64(&self.g, &self.w, j, NeighborhoodMode::Truncated { cap: h })?.known)
        }
    }

    pub fn estimate(&self, j: u64) -> Result<DriftEstimate> {
        if j == 0 {
            return Err(Error::Domain("drift is evaluated at j >= 1".into()));
        }
        let lower = self.neighborhood_lower(j)?;
        let ls_j = self.ls(j)? as f64;
        let mut window_part = 0.0;
        let mut parent_mass = 0.0;
        let parent = self.g.parent(j)?;
        for l in self.g.neighbors_up_to(j, self.limit) {
            let k = self.q[l as usize] / lower;
            window_part += k * (self.ls(l)? as f64 - ls_j).exp();
            if l == parent {
                parent_mass = k;
            }
        }
        let tail_allowance = self.tail_allowance(lower, ls_j)?;
        Ok(DriftEstimate {
            j,
            window_part,
            tail_allowance,
            upper: window_part + tail_allowance,
            prob_above_parent: (1.0 - parent_mass).max(0.0),
        })
    }

    /// Bounds `sum_{l > limit} Q(l)/L e^{log*(l) - log*(j)}` by dyadic chunks
    /// `[2^m, 2^{m+1})`: chunk mass at most `delta^s / (1 - delta)` with `s` its first
    /// point, and `log*` at most its value at `2^{m+1}`.
    fn tail_allowance(&self, lower: f64, ls_j: f64) -> Result<f64> {
        let first = self.limit + 1;
        let mut m = 63 - first.leading_zeros() as u64;
        let ln_d = self.delta.ln();
        let mut total = 0.0;
        loop {
            let s = if m < 64 { (1u64 << m).max(first) as f64 } else { 2f64.powi(m as i32) };
            let ln_mass = s * ln_d - (1.0 - self.delta).ln() - lower.ln();
            let ls_top = log_star_pow2((m + 1) as f64, self.base, self.convention)? as f64;
            let ln_term = ln_mass + ls_top - ls_j;
            total += ln_term.exp();
            // chunk masses square at each step, so once tiny they stay negligible
            if ln_term < -800.0 || m > 4096 {
                break;
            }
            m += 1;
        }
        Ok(total)
    }
}

pub fn drift_expectation(
    g: &GraphOracle,
    w: &WeightFamily,
    j: u64,
    cap: u64,
    base: f64,
    convention: LogStarConvention,
) -> Result<DriftEstimate> {
    DriftContext::new(g, w, cap, base, convention)?.estimate(j)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftSweep {
    pub from: u64,
    pub to: u64,
    pub threshold: f64,
    /// Largest `j` in range with an upper estimate at or above the threshold
    /// (`from - 1` when there is none).
    pub crossover: u64,
    /// Largest upper estimate over `j > crossover`.
    pub max_beyond: f64,
    pub ceiling: f64,
    pub worst_prob_above_parent: f64,
    pub values: Vec<DriftEstimate>,
}

pub fn drift_sweep(
    g: &GraphOracle,
    w: &WeightFamily,
    from: u64,
    to: u64,
    cap: u64,
    base: f64,
    threshold: f64,
) -> Result<DriftSweep> {
    if from < 1 || to < from {
        return Err(Error::Domain(format!("bad drift range [{from}, {to}]")));
    }
    let ctx = DriftContext::new(g, w, cap, base, LogStarConvention::AtMostOne)?;
    let js: Vec<u64> = (from..=to).collect();
    let values = crate::par::map(&js, |&j| ctx.estimate(j)).into_iter().collect::<Result<Vec<_>>>()?;
    let crossover = values.iter().rev().find(|v| v.upper >= threshold).map_or(from - 1, |v| v.j);
    let max_beyond = values.iter().filter(|v| v.j > crossover).map(|v| v.upper).fold(0.0, f64::max);
    let worst_prob_above_parent = values.iter().map(|v| v.prob_above_parent).fold(0.0, f64::max);
    Ok(DriftSweep { from, to, threshold, crossover, max_beyond, ceiling: drift_ceiling(), worst_prob_above_parent, values })
}

/// Exact upper bound on `P(X_1 > parent(j) | X_0 = j) = 1 - Q(parent) / Q(N(j))`.
pub fn prob_above_parent_exact(g: &GraphOracle, w: &WeightFamily, j: u64) -> Result<ExactRational> {
    let p = g.parent(j)?;
    let mode = if g.is_binary() { NeighborhoodMode::ClosedForm } else { NeighborhoodMode::Truncated { cap: j.max(p) + 64 } };
    let n = q_neighborhood_exact(g, w, j, mode)?;
    Ok(ExactRational::one() - w.q_exact(p)?.checked_div(&n.upper())?)
}
