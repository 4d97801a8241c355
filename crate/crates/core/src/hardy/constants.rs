//! The combinatorial constant `b(mu, nu)` and the best Hardy constant `c(mu, nu)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::tree::MeasuredTree;
use crate::numerics::Scalar;
use crate::{Error, Result};

/// Default bound on candidate subtrees formed while maximizing.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Largest tree (vertices, root included) handed to the dense eigensolver.
pub const MAX_C_VERTICES: usize = 512;

/// Which subtrees compete in `b`: those whose top is a child of the root, or
/// every admissible subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopScope {
    #[default]
    RootChildren,
    All,
}

impl std::str::FromStr for TopScope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "root-children" => Ok(TopScope::RootChildren),
            "all" => Ok(TopScope::All),
            _ => Err(Error::Parse(format!("unknown scope {s:?}; expected root-children or all"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyB<S> {
    pub value: S,
    /// Top and leaves of a maximizing subtree.
    pub top: usize,
    pub leaves: Vec<usize>,
    /// Candidates formed before dominance pruning.
    pub candidates: usize,
}

#[derive(Clone)]
struct Candidate<S> {
    mass: S,
    nu: S,
    leaves: Vec<usize>,
}

/// Keeps candidates not dominated by one with at least the mass and at most the
/// edge weight. The maximized ratio is increasing in mass and decreasing in
/// weight at every level of the recursion, so this loses nothing.
fn prune<S: Scalar>(mut v: Vec<Candidate<S>>) -> Vec<Candidate<S>> {
    v.sort_by(|a, b| {
        a.nu.partial_cmp(&b.nu)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.mass.partial_cmp(&a.mass).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut out: Vec<Candidate<S>> = Vec::new();
    for c in v {
        if out.last().is_none_or(|l| c.mass > l.mass) {
            out.push(c);
        }
    }
    out
}

struct Search<'a, S> {
    tree: &'a MeasuredTree<S>,
    masses: Vec<S>,
    formed: usize,
    cap: usize,
    every_top: bool,
    best: Option<HardyB<S>>,
}

impl<S: Scalar> Search<'_, S> {
    fn options(&mut self, x: usize) -> Result<Vec<Candidate<S>>> {
        let t = self.tree;
        let mut out = vec![Candidate { mass: self.masses[x].clone(), nu: t.nu(x).clone(), leaves: vec![x] }];
        let mut agg = vec![Candidate { mass: S::zero(), nu: S::zero(), leaves: Vec::new() }];
        for &c in t.children(x) {
            let sub = self.options(c)?;
            self.formed = self.formed.saturating_add(agg.len().saturating_mul(sub.len()));
            if self.formed > self.cap {
                return Err(Error::BudgetExhausted { what: "subtree candidates".into(), budget: self.cap as u64 });
            }
            let merged = agg
                .iter()
                .flat_map(|a| {
                    sub.iter().map(move |o| Candidate {
                        mass: a.mass.clone() + o.mass.clone(),
                        nu: a.nu.clone() + o.nu.clone(),
                        leaves: a.leaves.iter().chain(&o.leaves).copied().collect(),
                    })
                })
                .collect();
            agg = prune(merged);
        }
        if !t.children(x).is_empty() {
            let inv_top = S::one() / t.nu(x).clone();
            out.extend(agg.into_iter().map(|a| Candidate {
                nu: S::one() / (inv_top.clone() + S::one() / a.nu),
                mass: a.mass,
                leaves: a.leaves,
            }));
        }
        let out = prune(out);
        if self.every_top || t.parent(x) == Some(0) {
            for o in &out {
                let r = o.mass.clone() / o.nu.clone();
                if self.best.as_ref().is_none_or(|b| r > b.value) {
                    self.best = Some(HardyB { value: r, top: x, leaves: o.leaves.clone(), candidates: 0 });
                }
            }
        }
        Ok(out)
    }
}

/// `max mu(T*) / nu(T)` over admissible subtrees with tops in `scope`.
pub fn hardy_b<S: Scalar>(tree: &MeasuredTree<S>, scope: TopScope, cap: usize) -> Result<HardyB<S>> {
    let masses = tree.subtree_masses();
    let every_top = scope == TopScope::All;
    let mut search = Search { tree, masses, formed: 0, cap, every_top, best: None };
    for &m in tree.children(0) {
        match search.options(m) {
            Ok(_) => {}
            Err(Error::BudgetExhausted { .. }) => {
                // every singleton is admissible, so their ratios are a valid floor
                let floor = (1..tree.size())
                    .filter(|&y| every_top || tree.parent(y) == Some(0))
                    .map(|y| (search.masses[y].clone() / tree.nu(y).clone()).to_f64())
                    .fold(search.best.as_ref().map_or(0.0, |b| b.value.to_f64()), f64::max);
                return Err(Error::EnumerationCap { cap, partial_lower_bound: floor });
            }
            Err(e) => return Err(e),
        }
    }
    let mut b = search.best.take().ok_or_else(|| Error::InvalidTree("root has no children".into()))?;
    b.leaves.sort_unstable();
    b.candidates = search.formed;
    Ok(b)
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyC {
    pub c: f64,
    /// Eigen residual relative to `c`.
    pub residual: f64,
    /// Maximizer of `mu[f^2] / energy(f)`, normalized in `L^2(mu)`, root entry zero.
    pub maximizer: Vec<f64>,
}

/// Best constant in `mu[f^2] <= c * sum nu(x) (f(p(x)) - f(x))^2` with
/// `f(root) = 0`. Computed as the top eigenvalue of `M^(1/2) G M^(1/2)` where
/// `G(x, y)` is the edge resistance from the root to the last common ancestor,
/// which is the inverse of the Dirichlet form.
pub fn hardy_c<S: Scalar>(tree: &MeasuredTree<S>) -> Result<HardyC> {
    let n = tree.size();
    if n > MAX_C_VERTICES {
        return Err(Error::Domain(format!("dense Hardy constant limited to {MAX_C_VERTICES} vertices")));
    }
    let m = n - 1;
    let mut resistance = vec![0.0; n];
    let mut depth = vec![0usize; n];
    for x in 1..n {
        let p = tree.parent(x).unwrap_or(0);
        resistance[x] = resistance[p] + 1.0 / tree.nu(x).to_f64();
        depth[x] = depth[p] + 1;
    }
    let lca_resistance = |mut a: usize, mut b: usize| {
        while a != b {
            if depth[a] >= depth[b] {
                a = tree.parent(a).unwrap_or(0);
            } else {
                b = tree.parent(b).unwrap_or(0);
            }
        }
        resistance[a]
    };
    let root_mu: Vec<f64> = (1..n).map(|x| tree.mu(x).to_f64().sqrt()).collect();
    let k = DMatrix::from_fn(m, m, |i, j| root_mu[i] * lca_resistance(i + 1, j + 1) * root_mu[j]);
    let eig = SymmetricEigen::new(k.clone());
    let (top, c) = eig.eigenvalues.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b });
    let g = eig.eigenvectors.column(top).into_owned();
    let residual = (&k * &g - &g * c).norm() / c.abs().max(f64::MIN_POSITIVE);
    let mut maximizer = vec![0.0];
    maximizer.extend((0..m).map(|i| g[i] / root_mu[i]));
    Ok(HardyC { c, residual, maximizer })
}

/// `mu[f^2] / energy(f)` for `f` with `f(root) = 0`.
pub fn hardy_ratio<S: Scalar>(tree: &MeasuredTree<S>, f: &[f64]) -> f64 {
    let mut mass = 0.0;
    let mut energy = 0.0;
    for x in 1..tree.size() {
        let p = tree.parent(x).unwrap_or(0);
        let fp = if p == 0 { 0.0 } else { f[p] };
        mass += tree.mu(x).to_f64() * f[x] * f[x];
        energy += tree.nu(x).to_f64() * (fp - f[x]) * (fp - f[x]);
    }
    mass / energy
}

#[derive(Debug, Clone, Serialize)]
pub struct HardySandwich {
    pub tree_digest: String,
    pub vertices: usize,
    /// Tops restricted to children of the root.
    pub b: f64,
    /// Every admissible subtree.
    pub b_all_tops: f64,
    pub c: f64,
    pub ratio: f64,
    pub ratio_all_tops: f64,
    pub residual: f64,
    /// `b <= c <= 16 b` with root-child tops.
    pub pass: bool,
    /// The same with every top.
    pub pass_all_tops: bool,
}

/// Tolerance on both sides of `b <= c <= 16 b`, relative to `b`.
pub const SANDWICH_TOLERANCE: f64 = 1e-9;

pub fn hardy_sandwich(tree: &MeasuredTree<f64>) -> Result<HardySandwich> {
    let b = hardy_b(tree, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP)?.value;
    let b_all = hardy_b(tree, TopScope::All, DEFAULT_ENUMERATION_CAP)?.value;
    let hc = hardy_c(tree)?;
    let holds = |b: f64| {
        let slack = SANDWICH_TOLERANCE * b;
        b <= hc.c + slack && hc.c <= 16.0 * b + slack && hc.residual <= SANDWICH_TOLERANCE
    };
    Ok(HardySandwich {
        tree_digest: tree.digest(),
        vertices: tree.size(),
        b,
        b_all_tops: b_all,
        c: hc.c,
        ratio: hc.c / b,
        ratio_all_tops: hc.c / b_all,
        residual: hc.residual,
        pass: holds(b),
        pass_all_tops: holds(b_all),
    })
}
