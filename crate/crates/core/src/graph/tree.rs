use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

use super::oracle::{GraphOracle, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeReport {
    pub n_max: u64,
    /// Parent links on `[1, n_max]` form a tree rooted at 0.
    pub is_tree: bool,
    pub cycle: Option<Vec<u64>>,
    /// Vertices whose parent chain leaves `[0, n_max]` or whose parent was not found.
    pub unresolved: Vec<u64>,
}

/// Follows parent links from every vertex in `[1, n_max]`, looking for cycles and
/// chains that fail to reach 0 inside the window.
pub fn verify_tree(g: &GraphOracle, n_max: u64) -> TreeReport {
    let n = n_max as usize;
    let mut parent: Vec<Option<u64>> = vec![None; n + 1];
    for x in 1..=n_max {
        parent[x as usize] = g.parent(x).ok();
    }
    // 0 = unvisited, 1 = on current path, 2 = reaches root, 3 = unresolved
    let mut state = vec![0u8; n + 1];
    state[0] = 2;
    let mut cycle = None;
    let mut unresolved = Vec::new();
    for start in 1..=n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        let outcome = loop {
            match state[v] {
                2 => break 2,
                3 => break 3,
                1 => {
                    let pos = path.iter().position(|&u| u == v).unwrap_or(0);
                    if cycle.is_none() {
                        cycle = Some(path[pos..].iter().map(|&u| u as u64).collect());
                    }
                    break 3;
                }
                _ => {}
            }
            state[v] = 1;
            path.push(v);
            match parent[v] {
                Some(p) if (p as usize) <= n => v = p as usize,
                _ => break 3,
            }
        };
        for &u in &path {
            state[u] = outcome;
            if outcome == 3 {
                unresolved.push(u as u64);
            }
        }
    }
    unresolved.sort_unstable();
    TreeReport { n_max, is_tree: cycle.is_none() && unresolved.is_empty(), cycle, unresolved }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub x_max: u64,
    /// `x` with `parent(x) > 2 log2(1 + x)`.
    pub exceptions: Vec<u64>,
    pub max_ratio_log2: f64,
    /// `max parent(j) / ln j` over `2 <= j <= x_max`, the constant used by the drift bound.
    pub max_ratio_ln: f64,
}

pub fn parent_growth_scan(g: &GraphOracle, x_max: u64) -> Result<GrowthReport> {
    let mut exceptions = Vec::new();
    let mut max_ratio_log2: f64 = 0.0;
    let mut max_ratio_ln: f64 = 0.0;
    for x in 1..=x_max {
        let p = g.parent(x)? as f64;
        let bound = 2.0 * (1.0 + x as f64).log2();
        if p > bound {
            exceptions.push(x);
        }
        max_ratio_log2 = max_ratio_log2.max(p / (1.0 + x as f64).log2());
        if x >= 2 {
            max_ratio_ln = max_ratio_ln.max(p / (x as f64).ln());
        }
    }
    Ok(GrowthReport { x_max, exceptions, max_ratio_log2, max_ratio_ln })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundSequence {
    #[serde(serialize_with = "ser_big_vec")]
    pub terms: Vec<VertexId>,
    /// Why the sequence stopped before the requested length, if it did.
    pub stopped: Option<String>,
}

fn ser_big_vec<S: serde::Serializer>(v: &[VertexId], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Largest term we will write out, in bits.
const SEQUENCE_MATERIALIZE_BITS: u64 = 1 << 24;

/// Starting at `x0`, repeatedly takes the smallest `y` in `[2^{3x}, 2^{3x+1})`
/// adjacent to `x` and to no other vertex below `2x`.
pub fn find_lowerbound_sequence(g: &GraphOracle, x0: u64, steps: usize, budget: u64) -> Result<LowerBoundSequence> {
    let mut terms = vec![VertexId::from(x0)];
    let mut x = VertexId::from(x0);
    for _ in 0..steps {
        let Ok(xs) = u64::try_from(&x) else {
            return Ok(LowerBoundSequence { terms, stopped: Some("term exceeds 64 bits".into()) });
        };
        let top = 3u64.checked_mul(xs).filter(|&t| t < SEQUENCE_MATERIALIZE_BITS);
        let Some(top) = top else {
            return Ok(LowerBoundSequence { terms, stopped: Some(format!("next term needs more than {SEQUENCE_MATERIALIZE_BITS} bits")) });
        };
        let next = if g.is_binary() {
            // bit x set, bits below 2x otherwise clear, top bit 3x: the smallest such integer
            let mut y = BigUint::from(0u32);
            y.set_bit(top, true);
            y.set_bit(xs, true);
            y
        } else {
            match scan_random(g, xs, top, budget)? {
                Some(y) => y,
                None => {
                    return Ok(LowerBoundSequence {
                        terms,
                        stopped: Some(format!("scan budget of {budget} candidates exhausted")),
                    })
                }
            }
        };
        terms.push(next.clone());
        x = next;
    }
    Ok(LowerBoundSequence { terms, stopped: None })
}

fn scan_random(g: &GraphOracle, x: u64, top: u64, budget: u64) -> Result<Option<VertexId>> {
    if top >= 63 {
        return Err(Error::Overflow(format!("random-model candidates near 2^{top} exceed 64 bits")));
    }
    let lo = 1u64 << top;
    let hi = (1u64 << (top + 1)) - 1;
    let below = 2 * x;
    for y in (lo..=hi).take(budget as usize) {
        if !g.adjacent(x, y) {
            continue;
        }
        if (0..below).all(|z| z == x || !g.adjacent(z, y)) {
            return Ok(Some(y.into()));
        }
    }
    Ok(None)
}
