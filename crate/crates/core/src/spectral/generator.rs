use serde::Serialize;

use crate::numerics::Scalar;
use crate::{Error, Result};

/// Relative tolerance for float reversibility and row-sum checks.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// A sub-Markovian generator on `0..n` with a reversing measure.
///
/// `pi` is normalized to total mass one at construction. In float mode very deep
/// truncations may carry underflowed zeros in `pi`; the eigen solver and the
/// subtree Cheeger strategy only look at rate ratios, so they are unaffected.
#[derive(Debug, Clone, PartialEq)]
pub struct SubMarkovGenerator<S> {
    rates: Vec<Vec<S>>,
    pi: Vec<S>,
}

/// The measure on edges of the extended vertex set; index `n` is the absorbing point.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeMeasure<S> {
    pub interior: Vec<(usize, usize, S)>,
    pub killing: Vec<(usize, S)>,
}

fn close<S: Scalar>(a: &S, b: &S) -> bool {
    if S::is_exact() {
        return a == b;
    }
    let (a, b) = (a.to_f64(), b.to_f64());
    (a - b).abs() <= FLOAT_TOLERANCE * a.abs().max(b.abs()) + 1e-300
}

impl<S: Scalar> SubMarkovGenerator<S> {
    pub fn new(rates: Vec<Vec<S>>, pi: Vec<S>) -> Result<Self> {
        let n = rates.len();
        if n == 0 || pi.len() != n || rates.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGenerator("rates must be square and match pi".into()));
        }
        let total = pi.iter().cloned().fold(S::zero(), |a, b| a + b);
        if pi.iter().any(|p| *p < S::zero()) || total <= S::zero() || !total.to_f64().is_finite() {
            return Err(Error::InvalidGenerator("pi must be nonnegative with positive mass".into()));
        }
        if S::is_exact() && pi.iter().any(|p| p.is_zero()) {
            return Err(Error::InvalidGenerator("pi must be positive".into()));
        }
        for (x, row) in rates.iter().enumerate() {
            let mut sum = S::zero();
            let mut scale = 0f64;
            for (y, v) in row.iter().enumerate() {
                if x != y && *v < S::zero() {
                    return Err(Error::InvalidGenerator(format!("negative rate L({x},{y})")));
                }
                scale = scale.max(v.to_f64().abs());
                sum = sum + v.clone();
            }
            let slack = if S::is_exact() { 0.0 } else { FLOAT_TOLERANCE * scale };
            if sum.to_f64() > slack || (S::is_exact() && sum > S::zero()) {
                return Err(Error::InvalidGenerator(format!("row {x} sums above zero")));
            }
        }
        let pi: Vec<S> = pi.into_iter().map(|p| p / total.clone()).collect();
        for x in 0..n {
            for y in (x + 1)..n {
                let a = pi[x].clone() * rates[x][y].clone();
                let b = pi[y].clone() * rates[y][x].clone();
                if !close(&a, &b) {
                    return Err(Error::InvalidGenerator(format!("not reversible at ({x},{y})")));
                }
            }
        }
        Ok(Self { rates, pi })
    }

    pub fn size(&self) -> usize {
        self.rates.len()
    }

    pub fn rate(&self, x: usize, y: usize) -> &S {
        &self.rates[x][y]
    }

    pub fn rates(&self) -> &[Vec<S>] {
        &self.rates
    }

    pub fn pi(&self) -> &[S] {
        &self.pi
    }

    /// Rate of absorption from `x`: minus the row sum.
    pub fn killing(&self, x: usize) -> S {
        let s = self.rates[x].iter().cloned().fold(S::zero(), |a, b| a + b);
        let k = -s;
        // float row sums leave round-off residue; that is not killing
        let noise = !S::is_exact() && k.to_f64() <= FLOAT_TOLERANCE * self.rates[x][x].to_f64().abs();
        if k < S::zero() || noise { S::zero() } else { k }
    }

    /// `max |L(x,x)|`.
    pub fn ell(&self) -> S {
        (0..self.size()).map(|x| self.rates[x][x].abs()).fold(S::zero(), S::max_of)
    }

    pub fn is_markovian(&self) -> bool {
        (0..self.size()).all(|x| self.killing(x).is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rates.iter().all(|r| r.iter().all(|v| v.is_zero()))
    }

    /// Connected through positive rates, with at least one killing vertex reachable.
    pub fn is_irreducible(&self) -> bool {
        let n = self.size();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if !seen[y] && x != y && self.rates[x][y] > S::zero() {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn edge_measure(&self) -> EdgeMeasure<S> {
        let n = self.size();
        let mut interior = Vec::new();
        let mut killing = Vec::new();
        for x in 0..n {
            for y in (x + 1)..n {
                let m = self.pi[x].clone() * self.rates[x][y].clone();
                if m > S::zero() {
                    interior.push((x, y, m));
                }
            }
            let k = self.pi[x].clone() * self.killing(x);
            if k > S::zero() {
                killing.push((x, k));
            }
        }
        EdgeMeasure { interior, killing }
    }

    /// `mu(boundary of A)` and `pi(A)` for the set flagged in `members`.
    pub fn boundary_and_mass(&self, members: &[bool]) -> (S, S) {
        let n = self.size();
        let mut boundary = S::zero();
        let mut mass = S::zero();
        for x in (0..n).filter(|&x| members[x]) {
            mass = mass + self.pi[x].clone();
            let mut out = self.killing(x);
            for y in (0..n).filter(|&y| !members[y]) {
                out = out + self.rates[x][y].clone();
            }
            boundary = boundary + self.pi[x].clone() * out;
        }
        (boundary, mass)
    }

    /// `L_T` for a set of kept edges; `None` as second endpoint is the absorbing point.
    pub fn restrict_to_edges(&self, edges: &[(usize, Option<usize>)]) -> Result<Self> {
        let n = self.size();
        let mut rates = vec![vec![S::zero(); n]; n];
        let mut kill = vec![false; n];
        for &(x, y) in edges {
            match y {
                Some(y) if x != y && x < n && y < n => {
                    rates[x][y] = self.rates[x][y].clone();
                    rates[y][x] = self.rates[y][x].clone();
                }
                None if x < n => kill[x] = true,
                _ => return Err(Error::InvalidGenerator(format!("bad edge ({x},{y:?})"))),
            }
        }
        for x in 0..n {
            let off = (0..n).filter(|&y| y != x).fold(S::zero(), |a, y| a + rates[x][y].clone());
            let k = if kill[x] { self.killing(x) } else { S::zero() };
            rates[x][x] = -(off + k);
        }
        Self::new(rates, self.pi.clone())
    }

    /// Relabels states: new state `i` is old state `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Domain("not a permutation".into()));
        }
        let rates = perm.iter().map(|&a| perm.iter().map(|&b| self.rates[a][b].clone()).collect()).collect();
        let pi = perm.iter().map(|&a| self.pi[a].clone()).collect();
        Ok(Self { rates, pi })
    }

    pub fn to_f64(&self) -> SubMarkovGenerator<f64> {
        SubMarkovGenerator {
            rates: self.rates.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect(),
            pi: self.pi.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Parent links when positive rates form a forest whose components each hold
    /// at most one killing vertex (the component root). `None` marks roots.
    pub fn tree_parents(&self) -> Option<Vec<Option<usize>>> {
        let n = self.size();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        let edges = (0..n)
            .flat_map(|x| ((x + 1)..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.rates[x][y] > S::zero())
            .count();
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut members = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                i += 1;
                for y in 0..n {
                    if !seen[y] && y != x && self.rates[x][y] > S::zero() {
                        seen[y] = true;
                        members.push(y);
                    }
                }
            }
            let roots: Vec<usize> = members.iter().copied().filter(|&x| self.killing(x) > S::zero()).collect();
            if roots.len() > 1 {
                return None;
            }
            // orient away from the root; a component without killing keeps its first vertex
            let root = roots.first().copied().unwrap_or(start);
            let mut order = vec![root];
            let mut placed = vec![false; n];
            placed[root] = true;
            let mut j = 0;
            while j < order.len() {
                let x = order[j];
                j += 1;
                for &y in &members {
                    if !placed[y] && self.rates[x][y] > S::zero() {
                        placed[y] = true;
                        parent[y] = Some(x);
                        order.push(y);
                    }
                }
            }
        }
        (edges + components == n).then_some(parent)
    }
}
