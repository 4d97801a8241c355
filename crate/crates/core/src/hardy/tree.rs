//! Finite rooted trees carrying a vertex measure and an edge measure, and the
//! admissible subtrees used by the Hardy constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::numerics::Scalar;
use crate::{Error, Result};

/// Vertex 0 is the root and every other vertex has a parent with a smaller
/// index. `nu[x]` weighs the edge `{x, p(x)}`; the root's entries are unused.
#[derive(Debug, Clone, Serialize)]
pub struct MeasuredTree<S> {
    parent: Vec<Option<usize>>,
    mu: Vec<S>,
    nu: Vec<S>,
    #[serde(skip)]
    children: Vec<Vec<usize>>,
}

impl<S: Scalar> MeasuredTree<S> {
    pub fn new(parent: Vec<Option<usize>>, mu: Vec<S>, nu: Vec<S>) -> Result<Self> {
        let n = parent.len();
        if n < 2 || mu.len() != n || nu.len() != n {
            return Err(Error::InvalidTree("need a root, at least one other vertex and matching measures".into()));
        }
        if parent[0].is_some() {
            return Err(Error::InvalidTree("vertex 0 must be the root".into()));
        }
        let mut children = vec![Vec::new(); n];
        for x in 1..n {
            match parent[x] {
                Some(p) if p < x => children[p].push(x),
                _ => return Err(Error::InvalidTree(format!("vertex {x} needs a parent with a smaller index"))),
            }
            if !(mu[x] > S::zero() && nu[x] > S::zero()) {
                return Err(Error::InvalidTree(format!("measures must be positive at vertex {x}")));
            }
        }
        Ok(MeasuredTree { parent, mu, nu, children })
    }

    pub fn size(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn mu(&self, x: usize) -> &S {
        &self.mu[x]
    }

    pub fn nu(&self, x: usize) -> &S {
        &self.nu[x]
    }

    pub fn mu_of(&self, set: &[usize]) -> S {
        set.iter().fold(S::zero(), |a, &x| a + self.mu[x].clone())
    }

    /// Vertices whose path to the root passes through `x`, `x` included.
    pub fn descendants(&self, x: usize) -> Vec<usize> {
        let mut out = vec![x];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// `mu` of every full subtree, indexed by its top vertex.
    pub fn subtree_masses(&self) -> Vec<S> {
        let mut m: Vec<S> = self.mu.clone();
        m[0] = S::zero();
        for x in (1..self.size()).rev() {
            if let Some(p) = self.parent[x].filter(|&p| p > 0) {
                let add = m[x].clone();
                m[p] = m[p].clone() + add;
            }
        }
        m
    }

    pub fn scale(&self, mu_factor: &S, nu_factor: &S) -> Self {
        let mu = self.mu.iter().map(|v| v.clone() * mu_factor.clone()).collect();
        let nu = self.nu.iter().map(|v| v.clone() * nu_factor.clone()).collect();
        MeasuredTree { parent: self.parent.clone(), mu, nu, children: self.children.clone() }
    }

    pub fn to_f64(&self) -> MeasuredTree<f64> {
        MeasuredTree {
            parent: self.parent.clone(),
            mu: self.mu.iter().map(|v| v.to_f64()).collect(),
            nu: self.nu.iter().map(|v| v.to_f64()).collect(),
            children: self.children.clone(),
        }
    }

    /// Hex sha256 over the parent links and the f64 images of both measures.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for x in 0..self.size() {
            h.update((self.parent[x].map_or(u64::MAX, |p| p as u64)).to_le_bytes());
            h.update(self.mu[x].to_f64().to_le_bytes());
            h.update(self.nu[x].to_f64().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Uniform random recursive tree with `n` non-root vertices; both measures
/// log-uniform in `[10^-decades, 10^decades]`.
pub fn random_measured_tree(n: usize, decades: f64, seed: u64) -> Result<MeasuredTree<f64>> {
    if n == 0 {
        return Err(Error::Domain("need at least one non-root vertex".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![None];
    let mut mu = vec![0.0];
    let mut nu = vec![0.0];
    for x in 1..=n {
        parent.push(Some(rng.random_range(0..x)));
        mu.push(10f64.powf(rng.random_range(-decades..=decades)));
        nu.push(10f64.powf(rng.random_range(-decades..=decades)));
    }
    MeasuredTree::new(parent, mu, nu)
}

/// A connected set of non-root vertices in which every member either keeps
/// all of its children or none of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleSubtree {
    members: Vec<usize>,
    top: usize,
    leaves: Vec<usize>,
}

impl AdmissibleSubtree {
    pub fn new<S: Scalar>(tree: &MeasuredTree<S>, members: &[usize]) -> Result<Self> {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let n = tree.size();
        if members.is_empty() || members.iter().any(|&x| x == 0 || x >= n) {
            return Err(Error::Domain("admissible subtrees are nonempty and avoid the root".into()));
        }
        let mut inside = vec![false; n];
        for &x in &members {
            inside[x] = true;
        }
        let tops: Vec<usize> = members.iter().copied().filter(|&x| !inside[tree.parent(x).unwrap_or(0)]).collect();
        if tops.len() != 1 {
            return Err(Error::Domain("admissible subtrees are connected".into()));
        }
        let mut leaves = Vec::new();
        for &x in &members {
            let kids = tree.children(x);
            let kept = kids.iter().filter(|&&c| inside[c]).count();
            if kept == 0 {
                leaves.push(x);
            } else if kept != kids.len() {
                return Err(Error::Domain(format!("vertex {x} keeps only some of its children")));
            }
        }
        Ok(AdmissibleSubtree { members, top: tops[0], leaves })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// The member closest to the root.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Harmonic recursion: a leaf contributes its edge weight, an inner member `m`
/// contributes `1 / (1/nu(m) + 1/sum over its children)`.
pub fn nu_functional<S: Scalar>(tree: &MeasuredTree<S>, t: &AdmissibleSubtree) -> S {
    fn rec<S: Scalar>(tree: &MeasuredTree<S>, t: &AdmissibleSubtree, x: usize) -> S {
        let kids = tree.children(x);
        if kids.is_empty() || !t.contains(kids[0]) {
            return tree.nu(x).clone();
        }
        let below = kids.iter().fold(S::zero(), |a, &c| a + rec(tree, t, c));
        let inv = S::one() / tree.nu(x).clone() + S::one() / below;
        S::one() / inv
    }
    rec(tree, t, t.top())
}

/// All descendants of the leaves of `t`, leaves included.
pub fn t_star<S: Scalar>(tree: &MeasuredTree<S>, t: &AdmissibleSubtree) -> Vec<usize> {
    let mut out: Vec<usize> = t.leaves().iter().flat_map(|&l| tree.descendants(l)).collect();
    out.sort_unstable();
    out
}

/// Every admissible subtree with the given top, as explicit member lists.
pub fn admissible_subtrees<S: Scalar>(tree: &MeasuredTree<S>, top: usize, cap: usize) -> Result<Vec<AdmissibleSubtree>> {
    fn rec<S: Scalar>(tree: &MeasuredTree<S>, x: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = vec![vec![x]];
        let kids = tree.children(x);
        if kids.is_empty() {
            return Ok(out);
        }
        let mut combos: Vec<Vec<usize>> = vec![vec![x]];
        for &c in kids {
            let sub = rec(tree, c, cap)?;
            if combos.len().saturating_mul(sub.len()) > cap {
                return Err(Error::BudgetExhausted { what: "admissible subtree enumeration".into(), budget: cap as u64 });
            }
            combos = combos
                .iter()
                .flat_map(|base| sub.iter().map(move |s| base.iter().chain(s).copied().collect()))
                .collect();
        }
        out.extend(combos);
        Ok(out)
    }
    if top == 0 || top >= tree.size() {
        return Err(Error::Domain("top must be a non-root vertex".into()));
    }
    rec(tree, top, cap)?.iter().map(|m| AdmissibleSubtree::new(tree, m)).collect()
}

/// A random admissible subtree below `top`: each member keeps its children
/// with probability `keep`.
pub fn random_admissible<S: Scalar>(tree: &MeasuredTree<S>, top: usize, keep: f64, rng: &mut impl Rng) -> Result<AdmissibleSubtree> {
    let mut members = vec![top];
    let mut i = 0;
    while i < members.len() {
        let x = members[i];
        i += 1;
        if !tree.children(x).is_empty() && rng.random_bool(keep) {
            members.extend_from_slice(tree.children(x));
        }
    }
    AdmissibleSubtree::new(tree, &members)
}

/// The tree induced on a connected prefix containing the root and all of its
/// children. Each vertex outside the prefix is lumped onto the prefix vertex
/// where its root path enters; edge weights are restricted. Returns the
/// truncated tree and the original label of every new vertex.
pub fn truncated_measures<S: Scalar>(tree: &MeasuredTree<S>, prefix: &[usize]) -> Result<(MeasuredTree<S>, Vec<usize>)> {
    let n = tree.size();
    let mut keep = vec![false; n];
    for &x in prefix {
        if x >= n {
            return Err(Error::Domain(format!("prefix vertex {x} out of range")));
        }
        keep[x] = true;
    }
    if !keep[0] || tree.children(0).iter().any(|&c| !keep[c]) {
        return Err(Error::Domain("prefix must contain the root and all of its children".into()));
    }
    if (1..n).any(|x| keep[x] && !keep[tree.parent(x).unwrap_or(0)]) {
        return Err(Error::Domain("prefix must be connected".into()));
    }
    let labels: Vec<usize> = (0..n).filter(|&x| keep[x]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &x) in labels.iter().enumerate() {
        index[x] = i;
    }
    let full = tree.subtree_masses();
    let mut parent = vec![None];
    let mut mu = vec![S::zero()];
    let mut nu = vec![S::zero()];
    for &x in &labels[1..] {
        parent.push(Some(index[tree.parent(x).unwrap_or(0)]));
        let lumped = tree.children(x).iter().filter(|&&c| !keep[c]).fold(tree.mu(x).clone(), |a, &c| a + full[c].clone());
        mu.push(lumped);
        nu.push(tree.nu(x).clone());
    }
    Ok((MeasuredTree::new(parent, mu, nu)?, labels))
}

/// Smallest admissible subtree of the full tree containing `t`, which lives in
/// the truncated tree whose vertex labels are `labels`.
pub fn completion<S: Scalar>(full: &MeasuredTree<S>, labels: &[usize], truncated: &MeasuredTree<S>, t: &AdmissibleSubtree) -> Result<AdmissibleSubtree> {
    let mut members: Vec<usize> = t.members().iter().map(|&x| labels[x]).collect();
    for &x in t.members() {
        if truncated.children(x).first().is_some_and(|&c| t.contains(c)) {
            members.extend_from_slice(full.children(labels[x]));
        }
    }
    AdmissibleSubtree::new(full, &members)
}

/// Nested connected prefixes growing by random frontier vertices, ending with
/// the whole tree. The first prefix is the root with its children.
pub fn random_prefix_chain<S: Scalar>(tree: &MeasuredTree<S>, steps: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current: Vec<usize> = std::iter::once(0).chain(tree.children(0).iter().copied()).collect();
    let mut frontier: Vec<usize> = current[1..].iter().flat_map(|&x| tree.children(x).iter().copied()).collect();
    let remaining = tree.size() - current.len();
    let steps = steps.max(1);
    let mut chain = vec![current.clone()];
    for k in 1..steps {
        let target = tree.size() - remaining + remaining * k / steps;
        while current.len() < target && !frontier.is_empty() {
            let x = frontier.swap_remove(rng.random_range(0..frontier.len()));
            current.push(x);
            frontier.extend_from_slice(tree.children(x));
        }
        chain.push(current.clone());
    }
    chain.push((0..tree.size()).collect());
    for p in chain.iter_mut() {
        p.sort_unstable();
    }
    chain.dedup();
    chain
}
