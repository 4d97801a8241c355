use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GraphOracle;
use crate::measure::{q_neighborhood_exact, q_neighborhood_f64, NeighborhoodMass, NeighborhoodMode, WeightFamily};
use crate::numerics::{exact_power, ExactRational, Poly, SymbolicRational};

/// Neighbors scanned past the window when `Q(N(x))` has no closed form.
pub(crate) const TRUNCATION_MARGIN: u64 = 64;

/// One row `K(x, .)` restricted to `[0, cap]`.
///
/// Entries are `Q(j) / U` where `U` is an upper bound on `Q(N(x))`, so they never
/// overstate the true kernel; `truncation_tail` is whatever the window misses.
#[derive(Debug, Clone, Serialize)]
pub struct KernelRow {
    pub source: u64,
    pub cap: u64,
    pub entries: Vec<(u64, f64)>,
    pub truncation_tail: f64,
    /// `sum_{j > cap} Q(j) / Q(parent(x))`, the analytic bound on mass beyond the window.
    pub analytic_tail_bound: f64,
}

pub(crate) fn check_window(g: &GraphOracle, x: u64, cap: u64) -> Result<u64> {
    if x == 0 {
        return Ok(0);
    }
    let p = g.parent(x)?;
    if cap < p {
        return Err(Error::CapTooSmall { cap, needed: p });
    }
    Ok(p)
}

fn neighborhood_upper_f64(g: &GraphOracle, w: &WeightFamily, x: u64, cap: u64) -> Result<NeighborhoodMass<f64>> {
    if g.is_binary() && w.delta().is_some() {
        q_neighborhood_f64(g, w, x, NeighborhoodMode::ClosedForm)
    } else {
        let h = cap.max(x).saturating_add(w.float_horizon().min(1 << 12));
        q_neighborhood_f64(g, w, x, NeighborhoodMode::Truncated { cap: h })
    }
}

pub fn kernel_row(g: &GraphOracle, w: &WeightFamily, x: u64, cap: u64) -> Result<KernelRow> {
    let p = check_window(g, x, cap)?;
    let n = neighborhood_upper_f64(g, w, x, cap)?;
    let u = n.upper();
    let entries: Vec<(u64, f64)> = g.neighbors_up_to(x, cap).into_iter().map(|j| (j, w.q_f64(j) / u)).collect();
    let inside: f64 = entries.iter().rev().map(|e| e.1).sum();
    let analytic_tail_bound = if x == 0 { w.tail_f64(cap) / n.known } else { w.tail_f64(cap) / w.q_f64(p) };
    Ok(KernelRow { source: x, cap, entries, truncation_tail: (1.0 - inside).max(0.0), analytic_tail_bound })
}

/// Exact row `K(x, .)` on `[0, cap]`. Entries are `Q(j) / (S + u)` where `S` is
/// the materialized part of `Q(N(x))` and `u` a formal remainder in `[0, r]`.
#[derive(Debug, Clone, Serialize)]
pub struct ExactKernelRow {
    pub source: u64,
    pub cap: u64,
    pub delta: ExactRational,
    pub normalizer: NeighborhoodMass<ExactRational>,
    /// Neighbors of `source` in `[0, cap]`.
    pub window: Vec<u64>,
    /// `S - sum_{j in window} Q(j)`: materialized mass past the window. It can be
    /// negative only when part of an unmaterialized block lies inside the window.
    pub beyond_known: ExactRational,
}

pub fn kernel_row_exact(g: &GraphOracle, w: &WeightFamily, x: u64, cap: u64) -> Result<ExactKernelRow> {
    let delta = w.require_delta()?.clone();
    check_window(g, x, cap)?;
    let mode = if g.is_binary() {
        NeighborhoodMode::ClosedForm
    } else {
        NeighborhoodMode::Truncated { cap: cap.max(x).saturating_add(TRUNCATION_MARGIN) }
    };
    let normalizer = q_neighborhood_exact(g, w, x, mode)?;
    let window = g.neighbors_up_to(x, cap);
    let mut inside = ExactRational::zero();
    for &j in &window {
        inside += exact_power(&delta, j)?;
    }
    let beyond_known = &normalizer.known - &inside;
    Ok(ExactKernelRow { source: x, cap, delta, normalizer, window, beyond_known })
}

impl ExactKernelRow {
    fn denominator(&self) -> Poly {
        if self.normalizer.symbolic {
            Poly::linear(self.normalizer.known.clone(), ExactRational::one())
        } else {
            Poly::constant(self.normalizer.known.clone())
        }
    }

    pub fn is_materialized(&self) -> bool {
        !self.normalizer.symbolic
    }

    /// `K(x, j)` as a function of the remainder symbol; zero off the neighborhood.
    pub fn entry(&self, j: u64) -> SymbolicRational {
        if self.window.binary_search(&j).is_err() {
            return SymbolicRational::zero();
        }
        let q = self.delta.pow(j);
        SymbolicRational::new(Poly::constant(q), self.denominator())
    }

    /// `K(x, j)` when the row has no unknown remainder.
    pub fn entry_value(&self, j: u64) -> Option<ExactRational> {
        self.entry(j).as_constant()
    }

    /// `Q(j) / (S + r)`, a rational lower bound on `K(x, j)`.
    pub fn entry_lower(&self, j: u64) -> ExactRational {
        if self.window.binary_search(&j).is_err() {
            return ExactRational::zero();
        }
        self.delta.pow(j) / self.normalizer.upper()
    }

    /// Mass the window misses: `(beyond_known + u) / (S + u)`.
    pub fn tail(&self) -> SymbolicRational {
        let num = if self.normalizer.symbolic {
            Poly::linear(self.beyond_known.clone(), ExactRational::one())
        } else {
            Poly::constant(self.beyond_known.clone())
        };
        SymbolicRational::new(num, self.denominator())
    }

    /// Sums the entries one by one and adds the tail; true when the total is exactly 1.
    pub fn sums_to_one(&self) -> bool {
        let mut total = self.tail();
        for &j in &self.window {
            total = total.add(&self.entry(j));
        }
        total.as_constant() == Some(ExactRational::one())
    }
}
