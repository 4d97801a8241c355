use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GraphOracle;
use crate::numerics::{block_mass_exact, block_mass_f64, exact_power, geometric_tail_exact, ErrorBoundedReal, ExactRational};

use super::weights::WeightFamily;

/// Exact block masses `delta^{2^x} / ((1-delta)(1+delta^{2^x}))` are written out only
/// while `2^x * bits(delta)` stays below this many bits; past it the block is a
/// formal remainder with a rational upper bound.
pub const BLOCK_MATERIALIZE_BITS: u64 = 1 << 14;

/// Exponent used for the rational upper bound `delta^E / (1-delta)` on an
/// unmaterialized block (any `E <= 2^x` is valid).
pub const REMAINDER_EXPONENT_CAP: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborhoodMode {
    /// Set bits of `x` plus the block `{j : bit x of j is 1}` in closed form (binary model only).
    ClosedForm,
    /// Neighbors up to `cap`, plus `sum_{j > cap} Q(j)` as the remainder bound.
    Truncated { cap: u64 },
}

/// `Q(N(x)) = known + r` with `0 <= r <= remainder`. When `symbolic` is false the
/// remainder is identically zero and `known` is the value itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodMass<T> {
    pub known: T,
    pub remainder: T,
    pub symbolic: bool,
}

impl NeighborhoodMass<ExactRational> {
    pub fn upper(&self) -> ExactRational {
        &self.known + &self.remainder
    }

    pub fn value(&self) -> Option<&ExactRational> {
        (!self.symbolic).then_some(&self.known)
    }
}

impl NeighborhoodMass<f64> {
    pub fn upper(&self) -> f64 {
        self.known + self.remainder
    }

    pub fn to_interval(&self) -> ErrorBoundedReal {
        let round = self.known * 4.0 * f64::EPSILON;
        ErrorBoundedReal::from_bounds(self.known - round, self.upper() + round)
    }
}

fn materializable(delta: &ExactRational, x: u64) -> bool {
    x < 63 && (1u128 << x) * (delta.bits().max(1) as u128) <= BLOCK_MATERIALIZE_BITS as u128
}

pub fn q_neighborhood_exact(
    g: &GraphOracle,
    w: &WeightFamily,
    x: u64,
    mode: NeighborhoodMode,
) -> Result<NeighborhoodMass<ExactRational>> {
    let delta = w.require_delta()?;
    match mode {
        NeighborhoodMode::ClosedForm => {
            if !g.is_binary() {
                return Err(Error::Domain("closed-form neighborhood mass needs the binary model".into()));
            }
            let mut known = ExactRational::zero();
            for b in (0..64u64.min(x)).filter(|&b| (x >> b) & 1 == 1) {
                known += exact_power(delta, b)?;
            }
            if materializable(delta, x) {
                known += block_mass_exact(delta, x as u32)?;
                Ok(NeighborhoodMass { known, remainder: ExactRational::zero(), symbolic: false })
            } else {
                let e = if x < 63 { (1u64 << x).min(REMAINDER_EXPONENT_CAP) } else { REMAINDER_EXPONENT_CAP };
                let remainder = exact_power(delta, e)?.checked_div(&(ExactRational::one() - delta))?;
                Ok(NeighborhoodMass { known, remainder, symbolic: true })
            }
        }
        NeighborhoodMode::Truncated { cap } => {
            let mut known = ExactRational::zero();
            let mut pw = ExactRational::one();
            let mut last = 0u64;
            for j in g.neighbors_up_to(x, cap) {
                pw *= exact_power(delta, j - last)?;
                last = j;
                known += &pw;
            }
            let remainder = geometric_tail_exact(delta, cap)?;
            Ok(NeighborhoodMass { known, remainder, symbolic: true })
        }
    }
}

pub fn q_neighborhood_f64(g: &GraphOracle, w: &WeightFamily, x: u64, mode: NeighborhoodMode) -> Result<NeighborhoodMass<f64>> {
    match mode {
        NeighborhoodMode::ClosedForm => {
            let Some(d) = w.delta_f64() else {
                return Err(Error::Domain("closed-form neighborhood mass needs geometric weights".into()));
            };
            if !g.is_binary() {
                return Err(Error::Domain("closed-form neighborhood mass needs the binary model".into()));
            }
            let mut known = 0.0;
            for b in (0..64u64.min(x)).filter(|&b| (x >> b) & 1 == 1) {
                known += d.powi(b as i32);
            }
            if x < 64 {
                known += block_mass_f64(d, x as u32);
            }
            Ok(NeighborhoodMass { known, remainder: 0.0, symbolic: false })
        }
        NeighborhoodMode::Truncated { cap } => {
            let nbrs = g.neighbors_up_to(x, cap);
            // add the smallest terms first
            let known: f64 = nbrs.iter().rev().map(|&j| w.q_f64(j)).sum();
            Ok(NeighborhoodMass { known, remainder: w.tail_f64(cap), symbolic: true })
        }
    }
}
