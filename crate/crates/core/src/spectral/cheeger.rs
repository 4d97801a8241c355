use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eigen::dirichlet_eigenvalue;
use super::generator::SubMarkovGenerator;
use crate::numerics::Scalar;
use crate::{Error, Result};

/// Subset enumeration limit for the exhaustive strategy.
pub const MAX_EXHAUSTIVE_SIZE: usize = 22;
/// Tolerance used by the sandwich and L1 checks.
pub const CHECK_TOLERANCE: f64 = 1e-9;
/// Float Gray-code sweeps recompute from scratch this often to stop drift.
const REFRESH_EVERY: u64 = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheegerStrategy {
    Exhaustive,
    /// Descendant sets of the rate forest; exact when each component kills only at its root.
    Subtree,
}

impl std::str::FromStr for CheegerStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Self::Exhaustive),
            "subtree" => Ok(Self::Subtree),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheegerResult<S> {
    pub iota: S,
    pub argmin: Vec<usize>,
    pub strategy: CheegerStrategy,
    pub sets_examined: u64,
}

pub fn cheeger_constant<S: Scalar>(l: &SubMarkovGenerator<S>, strategy: CheegerStrategy) -> Result<CheegerResult<S>> {
    match strategy {
        CheegerStrategy::Exhaustive => exhaustive(l),
        CheegerStrategy::Subtree => subtree(l),
    }
}

fn exhaustive<S: Scalar>(l: &SubMarkovGenerator<S>) -> Result<CheegerResult<S>> {
    let n = l.size();
    if n > MAX_EXHAUSTIVE_SIZE {
        return Err(Error::Domain(format!("exhaustive search needs n <= {MAX_EXHAUSTIVE_SIZE}, got {n}")));
    }
    let pi = l.pi();
    // symmetric edge weights and killing masses
    let m: Vec<Vec<S>> = (0..n).map(|x| (0..n).map(|y| pi[x].clone() * l.rate(x, y).clone()).collect()).collect();
    let k: Vec<S> = (0..n).map(|x| pi[x].clone() * l.killing(x)).collect();

    let mut members = vec![false; n];
    let mut boundary = S::zero();
    let mut mass = S::zero();
    let mut best: Option<(S, S, u64)> = None;
    let total: u64 = 1 << n;
    for step in 1..total {
        // Gray code: flip the lowest set bit position of `step`
        let v = step.trailing_zeros() as usize;
        let adding = !members[v];
        let mut delta = k[v].clone();
        for y in (0..n).filter(|&y| y != v) {
            if members[y] {
                delta = delta - m[y][v].clone();
            } else {
                delta = delta + m[v][y].clone();
            }
        }
        members[v] = adding;
        if adding {
            boundary = boundary + delta;
            mass = mass + pi[v].clone();
        } else {
            boundary = boundary - delta;
            mass = mass - pi[v].clone();
        }
        if !S::is_exact() && step % REFRESH_EVERY == 0 {
            (boundary, mass) = l.boundary_and_mass(&members);
        }
        if mass <= S::zero() {
            continue;
        }
        let gray = step ^ (step >> 1);
        let better = match &best {
            None => true,
            Some((b, p, _)) => boundary.clone() * p.clone() < b.clone() * mass.clone(),
        };
        if better {
            best = Some((boundary.clone(), mass.clone(), gray));
        }
    }
    let (b, p, set) = best.ok_or_else(|| Error::Domain("no admissible set".into()))?;
    let argmin: Vec<usize> = (0..n).filter(|&i| (set >> i) & 1 == 1).collect();
    // report the ratio from a clean recomputation
    let flags: Vec<bool> = (0..n).map(|i| (set >> i) & 1 == 1).collect();
    let (b2, p2) = if S::is_exact() { (b, p) } else { l.boundary_and_mass(&flags) };
    let iota = clamp_nonneg(b2 / p2);
    Ok(CheegerResult { iota, argmin, strategy: CheegerStrategy::Exhaustive, sets_examined: total - 1 })
}

fn clamp_nonneg<S: Scalar>(v: S) -> S {
    if v < S::zero() { S::zero() } else { v }
}

fn subtree<S: Scalar>(l: &SubMarkovGenerator<S>) -> Result<CheegerResult<S>> {
    let n = l.size();
    let parent = l
        .tree_parents()
        .ok_or_else(|| Error::Domain("subtree strategy needs a rate forest killing only at component roots".into()))?;
    let mut children = vec![Vec::new(); n];
    for (x, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(x);
        }
    }
    // post-order so children are done first
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = (0..n).filter(|&x| parent[x].is_none()).collect();
    while let Some(x) = stack.pop() {
        order.push(x);
        stack.extend(children[x].iter().copied());
    }
    // rel[x] = pi(T_x) / pi(x), from ratios pi(c)/pi(x) = L(x,c)/L(c,x)
    let mut rel: Vec<S> = vec![S::one(); n];
    for &x in order.iter().rev() {
        let mut r = S::one();
        for &c in &children[x] {
            r = r + l.rate(x, c).clone() / l.rate(c, x).clone() * rel[c].clone();
        }
        rel[x] = r;
    }
    let mut best: Option<(S, usize)> = None;
    for a in 0..n {
        let exit = match parent[a] {
            Some(p) => l.rate(a, p).clone(),
            None => l.killing(a),
        };
        let ratio = exit / rel[a].clone();
        if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
            best = Some((ratio, a));
        }
    }
    let (iota, a) = best.ok_or_else(|| Error::Domain("empty generator".into()))?;
    let mut argmin = vec![a];
    let mut i = 0;
    while i < argmin.len() {
        let x = argmin[i];
        i += 1;
        argmin.extend(children[x].iter().copied());
    }
    argmin.sort_unstable();
    Ok(CheegerResult { iota, argmin, strategy: CheegerStrategy::Subtree, sets_examined: n as u64 })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub size: usize,
    pub iota: f64,
    pub lambda: f64,
    pub ell: f64,
    pub lower: f64,
    pub residual: f64,
    pub strategy: CheegerStrategy,
    pub pass: bool,
}

/// Checks `iota^2 / (2 ell) <= lambda <= iota`.
pub fn cheeger_sandwich_check<S: Scalar>(l: &SubMarkovGenerator<S>, strategy: CheegerStrategy) -> Result<SandwichReport> {
    let c = cheeger_constant(l, strategy)?;
    let e = dirichlet_eigenvalue(l)?;
    let iota = c.iota.to_f64();
    let ell = l.ell().to_f64();
    let lower = if ell > 0.0 { iota * iota / (2.0 * ell) } else { 0.0 };
    let pass = lower <= e.lambda + CHECK_TOLERANCE && e.lambda <= iota + CHECK_TOLERANCE;
    Ok(SandwichReport { size: l.size(), iota, lambda: e.lambda, ell, lower, residual: e.residual, strategy, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct L1Report {
    pub iota: f64,
    pub trials: usize,
    pub min_ratio: f64,
    pub violations: usize,
    pub indicator_ratio: f64,
    pub constant_ratio: f64,
    pub pass: bool,
}

/// `sum_e |d f|(e) mu(e) / pi[|f|]` with `f` extended by zero at the absorbing point.
pub fn l1_ratio(l: &SubMarkovGenerator<f64>, f: &[f64]) -> f64 {
    let em = l.edge_measure();
    let num: f64 = em.interior.iter().map(|&(x, y, m)| (f[x] - f[y]).abs() * m).sum::<f64>()
        + em.killing.iter().map(|&(x, m)| f[x].abs() * m).sum::<f64>();
    let den: f64 = l.pi().iter().zip(f).map(|(p, v)| p * v.abs()).sum();
    num / den
}

/// Random functions never beat the Cheeger constant in the L1 ratio, and the
/// minimizing indicator attains it.
pub fn l1_characterization_check(l: &SubMarkovGenerator<f64>, trials: usize, seed: u64) -> Result<L1Report> {
    let c = cheeger_constant(l, CheegerStrategy::Exhaustive)?;
    let n = l.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut violations = 0;
    for t in 0..trials {
        let f: Vec<f64> = match t % 3 {
            0 => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            1 => (0..n).map(|_| if rng.random_bool(0.5) { rng.random_range(0.0..1.0) } else { 0.0 }).collect(),
            _ => (0..n).map(|_| rng.random_range(0.0f64..1.0).powi(4)).collect(),
        };
        if f.iter().all(|v| *v == 0.0) {
            continue;
        }
        let r = l1_ratio(l, &f);
        min_ratio = min_ratio.min(r);
        if r < c.iota - CHECK_TOLERANCE {
            violations += 1;
        }
    }
    let mut ind = vec![0.0; n];
    for &i in &c.argmin {
        ind[i] = 1.0;
    }
    let indicator_ratio = l1_ratio(l, &ind);
    let constant_ratio = l1_ratio(l, &vec![1.0; n]);
    let pass = violations == 0
        && (indicator_ratio - c.iota).abs() <= CHECK_TOLERANCE
        && constant_ratio >= c.iota - CHECK_TOLERANCE;
    Ok(L1Report { iota: c.iota, trials, min_ratio, violations, indicator_ratio, constant_ratio, pass })
}
