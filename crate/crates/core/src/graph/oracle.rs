use std::hash::Hasher;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use siphasher::sip128::{Hasher128, SipHasher13};

use crate::error::{Error, Result};

/// Vertex label; arbitrary precision so that tower-sized states can be named.
pub type VertexId = BigUint;

/// How far a random-model parent search scans before giving up.
pub const PARENT_SCAN_LIMIT: u64 = 4096;

/// Largest common-neighbor witness `2^i + 2^j` we write out in full (in bits).
const WITNESS_MATERIALIZE_BITS: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum GraphModel {
    /// `i ~ j` iff bit `min(i,j)` of `max(i,j)` is set.
    BinaryRado,
    /// Each pair is an edge independently with probability `p`, decided by a
    /// keyed hash of `(seed, min, max)`.
    Random { p: f64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct GraphOracle {
    model: GraphModel,
    keys: (u64, u64),
}

impl GraphOracle {
    pub fn binary() -> Self {
        Self { model: GraphModel::BinaryRado, keys: (0, 0) }
    }

    pub fn random(p: f64, seed: u64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("edge probability must be in (0,1), got {p}")));
        }
        Ok(Self { model: GraphModel::Random { p, seed }, keys: (seed, seed ^ 0x9e37_79b9_7f4a_7c15) })
    }

    pub fn model(&self) -> &GraphModel {
        &self.model
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.model, GraphModel::BinaryRado)
    }

    /// Uniform in `[0,1)` derived from the pair; symmetric by construction.
    fn pair_uniform(&self, lo: u64, hi: u64) -> f64 {
        let mut h = SipHasher13::new_with_keys(self.keys.0, self.keys.1);
        h.write_u64(lo);
        h.write_u64(hi);
        let v = h.finish128().h1;
        (v >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn pair_uniform_big(&self, lo: &VertexId, hi: &VertexId) -> f64 {
        if let (Some(a), Some(b)) = (lo.to_u64(), hi.to_u64()) {
            return self.pair_uniform(a, b);
        }
        let mut h = SipHasher13::new_with_keys(self.keys.0, self.keys.1);
        for v in [lo, hi] {
            let bytes = v.to_bytes_le();
            h.write_u64(u64::MAX);
            h.write_u64(bytes.len() as u64);
            h.write(&bytes);
        }
        let v = h.finish128().h1;
        (v >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn adjacent(&self, i: u64, j: u64) -> bool {
        if i == j {
            return false;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        match self.model {
            GraphModel::BinaryRado => lo < 64 && (hi >> lo) & 1 == 1,
            GraphModel::Random { p, .. } => self.pair_uniform(lo, hi) < p,
        }
    }

    pub fn adjacent_big(&self, i: &VertexId, j: &VertexId) -> bool {
        if i == j {
            return false;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        match self.model {
            // the smaller label indexes a bit of the larger; any stored integer has < 2^64 bits
            GraphModel::BinaryRado => lo.to_u64().is_some_and(|b| hi.bit(b)),
            GraphModel::Random { p, .. } => self.pair_uniform_big(lo, hi) < p,
        }
    }

    /// Neighbors of `x` in `[0, cap]`, ascending.
    pub fn neighbors_up_to(&self, x: u64, cap: u64) -> Vec<u64> {
        match self.model {
            GraphModel::BinaryRado => {
                let mut out: Vec<u64> = (0..64u64.min(x)).filter(|&b| (x >> b) & 1 == 1 && b <= cap).collect();
                out.extend(binary_block(x, cap));
                out
            }
            GraphModel::Random { .. } => (0..=cap).filter(|&y| self.adjacent(x, y)).collect(),
        }
    }

    /// Smallest neighbor of `x`.
    pub fn parent(&self, x: u64) -> Result<u64> {
        match self.model {
            GraphModel::BinaryRado => {
                if x == 0 {
                    return Err(Error::Domain("vertex 0 is the root and has no parent".into()));
                }
                Ok(u64::from(x.trailing_zeros()))
            }
            GraphModel::Random { .. } => (0..PARENT_SCAN_LIMIT)
                .find(|&y| self.adjacent(x, y))
                .ok_or_else(|| Error::BudgetExhausted {
                    what: format!("no neighbor of {x} below the parent scan limit"),
                    budget: PARENT_SCAN_LIMIT,
                }),
        }
    }

    pub fn parent_big(&self, x: &VertexId) -> Result<VertexId> {
        match self.model {
            GraphModel::BinaryRado => x
                .trailing_zeros()
                .map(VertexId::from)
                .ok_or_else(|| Error::Domain("vertex 0 is the root and has no parent".into())),
            GraphModel::Random { .. } => {
                let mut y = VertexId::zero();
                for _ in 0..PARENT_SCAN_LIMIT {
                    if self.adjacent_big(x, &y) {
                        return Ok(y);
                    }
                    y += 1u32;
                }
                Err(Error::BudgetExhausted { what: format!("no neighbor of {x} below the parent scan limit"), budget: PARENT_SCAN_LIMIT })
            }
        }
    }

    /// Vertices in `[1, cap]` whose parent is `x`, ascending.
    pub fn children_up_to(&self, x: u64, cap: u64) -> Vec<u64> {
        match self.model {
            GraphModel::BinaryRado => {
                if x >= 63 {
                    return Vec::new();
                }
                let step = 1u64 << (x + 1);
                let mut out = Vec::new();
                let mut y = 1u64 << x;
                while y <= cap {
                    out.push(y);
                    match y.checked_add(step) {
                        Some(n) => y = n,
                        None => break,
                    }
                }
                out
            }
            GraphModel::Random { .. } => {
                (1..=cap).filter(|&y| y != x && self.adjacent(x, y) && self.parent(y).ok() == Some(x)).collect()
            }
        }
    }

    /// A vertex adjacent to both `i` and `j`.
    pub fn common_neighbor(&self, i: u64, j: u64) -> Result<CommonNeighbor> {
        if i == j {
            return Err(Error::Domain("common neighbor needs two distinct vertices".into()));
        }
        let direct = self.adjacent(i, j);
        match self.model {
            GraphModel::BinaryRado => {
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                let witness = if hi < WITNESS_MATERIALIZE_BITS {
                    let mut v = VertexId::zero();
                    v.set_bit(lo, true);
                    v.set_bit(hi, true);
                    Witness::Vertex(v)
                } else {
                    Witness::TwoBits { low: lo, high: hi }
                };
                Ok(CommonNeighbor { witness, directly_adjacent: direct })
            }
            GraphModel::Random { .. } => {
                let start = i.max(j) + 1;
                let budget = 1u64 << 20;
                (start..start.saturating_add(budget))
                    .find(|&k| self.adjacent(i, k) && self.adjacent(j, k))
                    .map(|k| CommonNeighbor { witness: Witness::Vertex(k.into()), directly_adjacent: direct })
                    .ok_or(Error::BudgetExhausted { what: format!("common neighbor of {i} and {j}"), budget })
            }
        }
    }
}

/// Vertices `y` in `(x, cap]` with bit `x` set, ascending.
fn binary_block(x: u64, cap: u64) -> impl Iterator<Item = u64> {
    let valid = x < 63 && (1u64 << x) <= cap;
    let width = if valid { 1u64 << x } else { 0 };
    let period = width.wrapping_mul(2);
    let mut base = width;
    let mut r = 0u64;
    std::iter::from_fn(move || {
        if !valid {
            return None;
        }
        if r == width {
            r = 0;
            base = base.checked_add(period)?;
        }
        let y = base.checked_add(r)?;
        if y > cap {
            return None;
        }
        r += 1;
        Some(y)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    Vertex(#[serde(serialize_with = "crate::report::ser_biguint")] VertexId),
    /// `2^low + 2^high`, too large to write out.
    TwoBits { low: u64, high: u64 },
}

impl Witness {
    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Witness::Vertex(v) => v.to_u64(),
            Witness::TwoBits { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommonNeighbor {
    pub witness: Witness,
    /// The two inputs are themselves adjacent, so the walk needs no intermediate vertex.
    pub directly_adjacent: bool,
}

