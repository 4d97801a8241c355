use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cheeger::{cheeger_constant, CheegerStrategy};
use super::generator::SubMarkovGenerator;
use crate::numerics::Scalar;
use crate::{Error, Result};

/// Extended-vertex limit (states plus the absorbing point) for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SpanningMode {
    /// Every spanning tree of the extended graph, exact Cheeger constants.
    Exhaustive,
    /// Random spanning trees; each is bounded by its best singleton set.
    Witness { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanningTreeReport<S> {
    pub mode: SpanningMode,
    pub trees_examined: u64,
    /// Kirchhoff count, exhaustive mode only.
    pub matrix_tree_count: Option<u64>,
    /// Exhaustive: `max_T iota(L_T)`. Witness: max over sampled trees of the best singleton ratio.
    pub upper_bound: S,
    pub exact: bool,
    /// Witness mode: every sampled tree's bound came from a degree-one state.
    pub leaf_witness_everywhere: bool,
}

/// Edge `(x, None)` joins `x` to the absorbing point.
type Edge = (usize, Option<usize>);

fn extended_edges<S: Scalar>(l: &SubMarkovGenerator<S>) -> Vec<Edge> {
    let n = l.size();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            if *l.rate(x, y) > S::zero() {
                edges.push((x, Some(y)));
            }
        }
        if l.killing(x) > S::zero() {
            edges.push((x, None));
        }
    }
    edges
}

fn endpoint(v: Option<usize>, n: usize) -> usize {
    v.unwrap_or(n)
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// All spanning trees of the extended graph, by include/exclude backtracking.
pub fn enumerate_spanning_trees<S: Scalar>(l: &SubMarkovGenerator<S>) -> Result<Vec<Vec<Edge>>> {
    let n = l.size();
    if n + 1 > MAX_EXHAUSTIVE_VERTICES {
        return Err(Error::Domain(format!("exhaustive spanning trees need at most {MAX_EXHAUSTIVE_VERTICES} extended vertices")));
    }
    let edges = extended_edges(l);
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    backtrack(&edges, 0, n + 1, &mut chosen, &mut out);
    Ok(out)
}

fn backtrack(edges: &[Edge], i: usize, vertices: usize, chosen: &mut Vec<Edge>, out: &mut Vec<Vec<Edge>>) {
    let need = vertices - 1;
    if chosen.len() == need {
        out.push(chosen.clone());
        return;
    }
    if i == edges.len() || edges.len() - i < need - chosen.len() {
        return;
    }
    // include edge i if it closes no cycle
    let mut uf: Vec<usize> = (0..vertices).collect();
    for &(a, b) in chosen.iter() {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, endpoint(b, vertices - 1)));
        uf[ra] = rb;
    }
    let (a, b) = edges[i];
    if find(&mut uf, a) != find(&mut uf, endpoint(b, vertices - 1)) {
        chosen.push(edges[i]);
        backtrack(edges, i + 1, vertices, chosen, out);
        chosen.pop();
    }
    backtrack(edges, i + 1, vertices, chosen, out);
}

/// Number of spanning trees of the extended graph by the matrix-tree theorem
/// (fraction-free elimination on the reduced Laplacian).
pub fn matrix_tree_count<S: Scalar>(l: &SubMarkovGenerator<S>) -> u64 {
    let n = l.size();
    let edges = extended_edges(l);
    // Laplacian of the extended graph with the absorbing point removed
    let mut lap = vec![vec![0i128; n]; n];
    for &(a, b) in &edges {
        lap[a][a] += 1;
        if let Some(b) = b {
            lap[b][b] += 1;
            lap[a][b] -= 1;
            lap[b][a] -= 1;
        }
    }
    bareiss_det(lap).unsigned_abs() as u64
}

fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(r) = ((k + 1)..n).find(|&r| m[r][k] != 0) else { return 0 };
            m.swap(k, r);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Random spanning tree by Kruskal over random edge priorities.
fn random_spanning_tree(edges: &[Edge], vertices: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Edge>> {
    let mut order: Vec<(f64, Edge)> = edges.iter().map(|&e| (rng.random::<f64>(), e)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut uf: Vec<usize> = (0..vertices).collect();
    let mut tree = Vec::with_capacity(vertices - 1);
    for (_, (a, b)) in order {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, endpoint(b, vertices - 1)));
        if ra != rb {
            uf[ra] = rb;
            tree.push((a, b));
        }
    }
    (tree.len() == vertices - 1).then_some(tree)
}

/// Upper bound on the best Cheeger constant achievable by a spanning tree.
pub fn spanning_tree_iota_max<S: Scalar>(l: &SubMarkovGenerator<S>, mode: SpanningMode) -> Result<SpanningTreeReport<S>> {
    let n = l.size();
    match mode {
        SpanningMode::Exhaustive => {
            let trees = enumerate_spanning_trees(l)?;
            let count = matrix_tree_count(l);
            if trees.len() as u64 != count {
                return Err(Error::Domain(format!("enumerated {} trees, matrix-tree count {count}", trees.len())));
            }
            let mut best = S::zero();
            for t in &trees {
                let lt = l.restrict_to_edges(t)?;
                best = S::max_of(best, cheeger_constant(&lt, CheegerStrategy::Exhaustive)?.iota);
            }
            Ok(SpanningTreeReport {
                mode,
                trees_examined: trees.len() as u64,
                matrix_tree_count: Some(count),
                upper_bound: best,
                exact: true,
                leaf_witness_everywhere: false,
            })
        }
        SpanningMode::Witness { samples, seed } => {
            let edges = extended_edges(l);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<S> = None;
            let mut leaf_everywhere = true;
            for _ in 0..samples {
                let t = random_spanning_tree(&edges, n + 1, &mut rng)
                    .ok_or_else(|| Error::Domain("extended graph is disconnected".into()))?;
                let lt = l.restrict_to_edges(&t)?;
                let mut degree = vec![0usize; n];
                for &(a, b) in &t {
                    degree[a] += 1;
                    if let Some(b) = b {
                        degree[b] += 1;
                    }
                }
                let mut tree_best: Option<(S, usize)> = None;
                for x in 0..n {
                    let mut flags = vec![false; n];
                    flags[x] = true;
                    let (b, p) = lt.boundary_and_mass(&flags);
                    let r = b / p;
                    if tree_best.as_ref().is_none_or(|(v, _)| r < *v) {
                        tree_best = Some((r, x));
                    }
                }
                let (r, x) = tree_best.ok_or_else(|| Error::Domain("empty generator".into()))?;
                leaf_everywhere &= degree[x] == 1;
                best = Some(match best {
                    None => r,
                    Some(b) => S::max_of(b, r),
                });
            }
            Ok(SpanningTreeReport {
                mode,
                trees_examined: samples as u64,
                matrix_tree_count: None,
                upper_bound: best.unwrap_or_else(S::zero),
                exact: false,
                leaf_witness_everywhere: leaf_everywhere && samples > 0,
            })
        }
    }
}
