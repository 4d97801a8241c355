use serde::{Deserialize, Serialize};

use super::generator::SubMarkovGenerator;
use crate::graph::GraphOracle;
use crate::measure::{q_neighborhood_exact, q_neighborhood_f64, NeighborhoodMode, WeightFamily};
use crate::numerics::{exact_power, ExactRational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truncation {
    /// States `0..=cap`; mass leaving the window is killed.
    Window,
    /// States `1..=cap`; moves to `0` are killed too (the Dirichlet problem pinned at the root).
    PinnedRoot,
}

impl std::str::FromStr for Truncation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "window" => Ok(Self::Window),
            "pinned-root" => Ok(Self::PinnedRoot),
            _ => Err(Error::Parse(format!("unknown truncation {s:?}"))),
        }
    }
}

impl Truncation {
    fn first(self) -> u64 {
        match self {
            Self::Window => 0,
            Self::PinnedRoot => 1,
        }
    }
}

fn mass_mode(g: &GraphOracle, w: &WeightFamily, x: u64, cap: u64) -> Result<NeighborhoodMode> {
    if g.is_binary() && w.delta().is_some() {
        return Ok(NeighborhoodMode::ClosedForm);
    }
    let p = if x == 0 { 0 } else { g.parent(x)? };
    Ok(NeighborhoodMode::Truncated { cap: cap.max(p) + 64 })
}

/// `L = K - I` restricted to the window, in floating point.
///
/// Rows use `Q(y) / U(x)` with `U(x)` an upper bound on `Q(N(x))`, and the
/// reversing weight is `Q(x) U(x)`, so reversibility holds to rounding.
pub fn truncate_chain(g: &GraphOracle, w: &WeightFamily, cap: u64, kind: Truncation) -> Result<SubMarkovGenerator<f64>> {
    if cap < 2 {
        return Err(Error::Domain("truncation needs cap >= 2".into()));
    }
    let first = kind.first();
    let n = (cap - first + 1) as usize;
    if n > super::eigen::MAX_DENSE_SIZE {
        return Err(Error::Domain(format!("cap {cap} exceeds the dense limit")));
    }
    let mut rates = vec![vec![0.0; n]; n];
    let mut ln_pi = vec![0.0; n];
    for x in first..=cap {
        let i = (x - first) as usize;
        let u = q_neighborhood_f64(g, w, x, mass_mode(g, w, x, cap)?)?.upper();
        for y in g.neighbors_up_to(x, cap).into_iter().filter(|&y| y >= first) {
            rates[i][(y - first) as usize] = w.q_f64(y) / u;
        }
        rates[i][i] = -1.0;
        ln_pi[i] = w.ln_q(x) + u.ln();
    }
    let top = ln_pi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pi = ln_pi.iter().map(|v| (v - top).exp()).collect();
    SubMarkovGenerator::new(rates, pi)
}

/// Exact version of [`truncate_chain`]; every neighborhood mass in the window must be materialized.
pub fn truncate_chain_exact(
    g: &GraphOracle,
    w: &WeightFamily,
    cap: u64,
    kind: Truncation,
) -> Result<SubMarkovGenerator<ExactRational>> {
    if cap < 2 {
        return Err(Error::Domain("truncation needs cap >= 2".into()));
    }
    let first = kind.first();
    let n = (cap - first + 1) as usize;
    let mut rates = vec![vec![ExactRational::zero(); n]; n];
    let mut pi = vec![ExactRational::zero(); n];
    for x in first..=cap {
        let i = (x - first) as usize;
        let mass = q_neighborhood_exact(g, w, x, NeighborhoodMode::ClosedForm)?;
        let s = mass.value().cloned().ok_or(Error::Unmaterializable { height: x.min(u32::MAX as u64) as u32 })?;
        for y in g.neighbors_up_to(x, cap).into_iter().filter(|&y| y >= first) {
            rates[i][(y - first) as usize] = w.q_exact(y)? / s.clone();
        }
        rates[i][i] = -ExactRational::one();
        pi[i] = w.q_exact(x)? * s;
    }
    SubMarkovGenerator::new(rates, pi)
}

/// The pruned tree problem on `1..=cap` for the binary model: edges `{x, p(x)}` with
/// weight `Q(x) Q(p(x))`, vertex measure `mu(x) = Q(x) Q(p(x))` plus the mass of
/// children beyond the window. Edges to `0` become killing.
///
/// Its Dirichlet eigenvalue is `1 / c` for a Hardy constant `c` no larger than the
/// infinite tree's, so it bounds the infinite tree's eigenvalue from above.
pub fn pruned_tree_generator(w: &WeightFamily, cap: u64) -> Result<SubMarkovGenerator<f64>> {
    let d = w.delta_f64().ok_or_else(|| Error::Domain("pruned tree needs geometric weights".into()))?;
    if cap < 2 || cap as usize > super::eigen::MAX_DENSE_SIZE {
        return Err(Error::Domain(format!("cap must be in [2, {}]", super::eigen::MAX_DENSE_SIZE)));
    }
    let ln_d = d.ln();
    let parent = |x: u64| x.trailing_zeros() as u64;
    let n = cap as usize;
    // ln of mu'(x) / mu(x)
    let lump = |x: u64| -> f64 {
        if x >= 60 {
            return 0.0;
        }
        let step = 1u64 << x;
        let mut k = cap / step + 1;
        if k % 2 == 0 {
            k += 1;
        }
        let first = k as f64 * step as f64;
        let extra = ((first - parent(x) as f64) * ln_d).exp() / (1.0 - ((2 * step) as f64 * ln_d).exp());
        extra.ln_1p()
    };
    let mut rates = vec![vec![0.0; n]; n];
    let mut ln_pi = vec![0.0; n];
    for x in 1..=cap {
        let i = (x - 1) as usize;
        let p = parent(x);
        let lf = lump(x);
        // L(x, p) = nu(x) / mu'(x); L(x, c) = nu(c) / mu'(x) = delta^{c - p(x)} / lump
        let up = (-lf).exp();
        let mut out = up;
        if p >= 1 {
            rates[i][(p - 1) as usize] = up;
        }
        if x < 60 {
            let step = 1u64 << x;
            let mut c = step;
            while c <= cap {
                let r = ((c - p) as f64 * ln_d - lf).exp();
                rates[i][(c - 1) as usize] = r;
                out += r;
                c += 2 * step;
            }
        }
        rates[i][i] = -out;
        ln_pi[i] = (x + p) as f64 * ln_d + lf;
    }
    let top = ln_pi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pi = ln_pi.iter().map(|v| (v - top).exp()).collect();
    SubMarkovGenerator::new(rates, pi)
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeCheegerReport {
    pub a_max: u64,
    /// Subtree members above this are covered by the analytic tail.
    pub truncation: u64,
    /// Largest parent among early vertices whose parent is not smaller; `0` for the binary model.
    pub x1: u64,
    /// Certified lower bound on `inf_{x1 < a <= a_max} nu(edge at a) / mu(T_a)`.
    pub inf_lower: ExactRational,
    pub argmin: u64,
    /// Upper end of the bracket at the argmin (truncated sum only).
    pub upper_at_argmin: ExactRational,
    /// `inf` of truncated ratios over `1..=x1`, where no tail bound applies.
    pub below_x1: Option<(f64, u64)>,
    pub holds: bool,
}

/// Brackets `Q(a) Q(p(a)) / mu(T_a)` over `a in [1, a_max]` in exact arithmetic.
///
/// `mu(T_a)` sums exactly over descendants up to `2 a_max`; members beyond that
/// contribute at most `Q(a) delta^{M+1} / (1 - delta)` because their parents are `>= a`.
pub fn tree_cheeger_rado(g: &GraphOracle, w: &WeightFamily, a_max: u64) -> Result<TreeCheegerReport> {
    let delta = w.require_delta()?.clone();
    if a_max == 0 {
        return Err(Error::Domain("a_max must be positive".into()));
    }
    let m = 2 * a_max;
    let mut parent = vec![0u64; (m + 1) as usize];
    for x in 1..=m {
        parent[x as usize] = g.parent(x)?;
    }
    let x0 = (1..=m).filter(|&x| parent[x as usize] >= x).max().unwrap_or(0);
    let x1 = (1..=x0).map(|x| parent[x as usize]).max().unwrap_or(0);

    let mut children = vec![Vec::new(); (m + 1) as usize];
    for x in 1..=m {
        let p = parent[x as usize];
        if p <= m {
            children[p as usize].push(x);
        }
    }
    // post-order from the root
    let mut order = Vec::new();
    let mut stack = vec![0u64];
    let mut seen = vec![false; (m + 1) as usize];
    while let Some(x) = stack.pop() {
        if std::mem::replace(&mut seen[x as usize], true) {
            continue;
        }
        order.push(x);
        stack.extend(children[x as usize].iter().copied());
    }
    let mut subtree = vec![ExactRational::zero(); (m + 1) as usize];
    for &x in order.iter().rev().filter(|&&x| x > 0) {
        let mut s = exact_power(&delta, x + parent[x as usize])?;
        for &c in &children[x as usize] {
            s += &subtree[c as usize];
        }
        subtree[x as usize] = s;
    }
    let one_minus = ExactRational::one() - &delta;
    let tail_factor = exact_power(&delta, m + 1)?.checked_div(&one_minus)?;

    let mut best: Option<(ExactRational, u64, ExactRational)> = None;
    let mut below: Option<(f64, u64)> = None;
    for a in 1..=a_max {
        if !seen[a as usize] {
            continue;
        }
        let nu = exact_power(&delta, a + parent[a as usize])?;
        let known = &subtree[a as usize];
        if a <= x1 {
            let r = (&nu / known).to_f64();
            if below.is_none_or(|(b, _)| r < b) {
                below = Some((r, a));
            }
            continue;
        }
        let tail = exact_power(&delta, a)? * &tail_factor;
        let lo = &nu / &(known + &tail);
        if best.as_ref().is_none_or(|(b, _, _)| lo < *b) {
            let hi = &nu / known;
            best = Some((lo, a, hi));
        }
    }
    let (inf_lower, argmin, upper_at_argmin) = best.ok_or_else(|| Error::Domain("no certified vertex in range".into()))?;
    let holds = inf_lower >= one_minus;
    Ok(TreeCheegerReport { a_max, truncation: m, x1, inf_lower, argmin, upper_at_argmin, below_x1: below, holds })
}
