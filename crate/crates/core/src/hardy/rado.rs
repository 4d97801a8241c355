//! Constants for the parent tree of the binary Rado graph under geometric
//! weights `Q(x) = delta^x`: the path series `C`, path sums `B(z)`, brackets on
//! the Hardy supremum `A`, and the resulting analytic gap bounds.

use rand::Rng;
use serde::Serialize;

use super::constants::{hardy_b, TopScope, DEFAULT_ENUMERATION_CAP};
use super::tree::MeasuredTree;
use crate::measure::WeightFamily;
use crate::{Error, Result};

/// Terms of the path series are summed until they drop below this.
pub const SERIES_CUTOFF: f64 = 1e-30;

/// Materialized vertices need `Q(x) Q(p(x))` at least this large.
pub const WEIGHT_FLOOR: f64 = 1e-280;

pub const MAX_A_DEPTH: usize = 5;
pub const MAX_A_BREADTH: usize = 64;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathSeries {
    pub delta: f64,
    pub value: f64,
    pub terms: usize,
    /// Bound on the omitted terms.
    pub tail_bound: f64,
    /// Closed-form upper bound on the full series.
    pub closed_form_bound: f64,
}

/// `sum over l >= 0 of delta^(2^(2^l) - l)`.
pub fn path_series(delta: f64) -> Result<PathSeries> {
    check_delta(delta)?;
    let mut value = 0.0;
    let mut last = 1.0;
    let mut l = 0;
    while l < 2 || last >= SERIES_CUTOFF {
        if l > 9 {
            return Err(Error::Domain(format!("series does not settle for delta = {delta}")));
        }
        let exponent = 2f64.powf(2f64.powi(l)) - l as f64;
        last = delta.powf(exponent);
        value += last;
        l += 1;
    }
    // from l = 1 on the exponents at least double, so each term is at most
    // the square of the previous one
    let tail_bound = last * last / (1.0 - last * last);
    Ok(PathSeries { delta, value, terms: l as usize, tail_bound, closed_form_bound: path_series_closed_form(delta) })
}

/// 2 up to `delta = 1/sqrt(2)`, `1 + ceil(log2 log2 (2 / log2(1/delta)))` beyond.
pub fn path_series_closed_form(delta: f64) -> f64 {
    if delta <= std::f64::consts::FRAC_1_SQRT_2 {
        2.0
    } else {
        1.0 + (2.0 / (1.0 / delta).log2()).log2().log2().ceil()
    }
}

/// `Q(2^x) / Q(p(x)) = delta^(2^x - p(x))` with `p(x)` the lowest set bit.
pub fn b_vertex(delta: f64, x: u64) -> f64 {
    let p = x.trailing_zeros() as f64;
    let exponent = 2f64.powi(x.min(2048) as i32) - p;
    delta.powf(exponent)
}

/// `sum of b(z_n)` along a chain starting at the root with `p(z_n) = z_(n-1)`.
pub fn path_sum(delta: f64, z: &[u64]) -> Result<f64> {
    check_delta(delta)?;
    if z.first() != Some(&0) {
        return Err(Error::Domain("chains start at the root".into()));
    }
    for w in z.windows(2) {
        if w[1] == 0 || u64::from(w[1].trailing_zeros()) != w[0] {
            return Err(Error::Domain(format!("{} is not a child of {}", w[1], w[0])));
        }
    }
    Ok(z[1..].iter().map(|&x| b_vertex(delta, x)).sum())
}

/// Random chain `z_n = y_n 2^(z_(n-1))` with odd `y_n < 256`, stopping at
/// `max_len` steps or when the next label leaves `u64`.
pub fn random_parent_chain(rng: &mut impl Rng, max_len: usize) -> Vec<u64> {
    let mut z = vec![0u64];
    while z.len() <= max_len {
        let prev = z[z.len() - 1];
        if prev > 63 {
            break;
        }
        let room = 64 - prev as u32;
        let bits = (room - 1).min(7);
        let y = 2 * rng.random_range(0..(1u64 << bits)) + 1;
        z.push(y << prev);
    }
    z
}

/// The chain taking the smallest child at every step: 0, 1, 2, 4, 16, 65536.
pub fn smallest_child_chain() -> Vec<u64> {
    let mut z = vec![0u64, 1];
    while let Some(next) = 1u64.checked_shl(z[z.len() - 1] as u32).filter(|_| z[z.len() - 1] < 64) {
        z.push(next);
    }
    z
}

#[derive(Debug, Clone)]
pub struct RadoTree {
    pub tree: MeasuredTree<f64>,
    /// Original vertex label of each tree index.
    pub labels: Vec<u64>,
}

/// The parent tree cut at `depth` levels below the root and `breadth` children
/// per vertex, with `mu = nu = Q(x) Q(p(x))`. Children that are not
/// materialized are lumped into their parent's vertex mass from below: exactly
/// for geometric weights (one generation), not at all otherwise, so `b` of the
/// result never exceeds the supremum over the full tree.
pub fn rado_measured_tree(w: &WeightFamily, depth: usize, breadth: usize) -> Result<RadoTree> {
    if depth == 0 || breadth == 0 {
        return Err(Error::Domain("depth and breadth must be positive".into()));
    }
    let mut labels = vec![0u64];
    let mut level = vec![0usize];
    let mut parent = vec![None];
    let mut ln_weight = vec![0.0];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &i in &level {
            let x = labels[i];
            if x >= 64 {
                continue;
            }
            for k in 0..breadth as u64 {
                let Some(c) = (2 * k + 1).checked_mul(1u64 << x).filter(|_| (2 * k + 1).leading_zeros() as u64 > x) else {
                    break;
                };
                let lw = w.ln_q(c) + w.ln_q(x);
                if lw < WEIGHT_FLOOR.ln() {
                    break;
                }
                labels.push(c);
                parent.push(Some(i));
                ln_weight.push(lw);
                next.push(labels.len() - 1);
            }
        }
        level = next;
    }
    let n = labels.len();
    let mut kids = vec![0u64; n];
    for x in 1..n {
        if let Some(p) = parent[x] {
            kids[p] += 1;
        }
    }
    let nu: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { ln_weight[i].exp() }).collect();
    let mut mu = nu.clone();
    if let Some(delta) = w.delta_f64() {
        for i in 1..n {
            mu[i] += lumped_children(delta, labels[i], kids[i]);
        }
    }
    Ok(RadoTree { tree: MeasuredTree::new(parent, mu, nu)?, labels })
}

/// `sum over k >= first of delta^((2k+1) 2^x) delta^x`.
fn lumped_children(delta: f64, x: u64, first: u64) -> f64 {
    if x >= 64 {
        return 0.0;
    }
    let step = 2f64.powi(x as i32);
    let ln = delta.ln();
    let head = (ln * ((2 * first + 1) as f64 * step + x as f64)).exp();
    head / (1.0 - (ln * 2.0 * step).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyBracket {
    pub delta: f64,
    pub depth: usize,
    pub breadth: usize,
    pub vertices: usize,
    pub lower: f64,
    pub upper: f64,
    /// Label of the top vertex of the subtree attaining `lower`.
    pub witness_top: u64,
    /// Implied range for the best tree Poincare constant.
    pub gap_range: (f64, f64),
}

/// Brackets the Hardy supremum of the parent tree: the lower end from `b` on
/// a truncated tree, the upper end `(1 + C) / (1 - delta)`.
pub fn rado_hardy_bracket(delta: f64, depth: usize, breadth: usize) -> Result<HardyBracket> {
    check_delta(delta)?;
    if depth > MAX_A_DEPTH || breadth > MAX_A_BREADTH {
        return Err(Error::Domain(format!("depth <= {MAX_A_DEPTH} and breadth <= {MAX_A_BREADTH}")));
    }
    let w = WeightFamily::geometric(crate::numerics::ExactRational::from_f64(delta)?)?;
    let rt = rado_measured_tree(&w, depth, breadth)?;
    let b = hardy_b(&rt.tree, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP)?;
    let c = path_series(delta)?;
    let upper = (1.0 + c.value + c.tail_bound) / (1.0 - delta);
    Ok(HardyBracket {
        delta,
        depth,
        breadth,
        vertices: rt.tree.size(),
        lower: b.value,
        upper,
        witness_top: rt.labels[b.top],
        gap_range: (1.0 / (16.0 * upper), 1.0 / b.value),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GapBounds {
    pub delta: f64,
    /// `(1 - delta)^2 / 2`.
    pub cheeger: f64,
    /// `(1 - delta) / (16 max(2, ceil(log2 log2 (2 / log2(1/delta)))))`.
    pub hardy: f64,
    /// `(1 - delta) / (16 (1 + C))`, chaining the bracket with the series value.
    pub hardy_chained: f64,
    pub series: f64,
    /// Multiply a tree bound by this to bound the walk itself.
    pub walk_factor: f64,
}

pub fn gap_bounds(delta: f64) -> Result<GapBounds> {
    check_delta(delta)?;
    let inner = 2.0 / (1.0 / delta).log2();
    let k = if inner > 2.0 { inner.log2().log2().ceil() } else { 0.0 };
    let c = path_series(delta)?;
    let series = c.value + c.tail_bound;
    Ok(GapBounds {
        delta,
        cheeger: (1.0 - delta).powi(2) / 2.0,
        hardy: (1.0 - delta) / (16.0 * k.max(2.0)),
        hardy_chained: (1.0 - delta) / (16.0 * (1.0 + series)),
        series,
        walk_factor: 1.0 - delta,
    })
}
