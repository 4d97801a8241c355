//! Hardy constants of truncated measures along nested prefixes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::constants::{hardy_b, hardy_c, TopScope, DEFAULT_ENUMERATION_CAP};
use super::tree::{completion, nu_functional, random_admissible, t_star, truncated_measures, MeasuredTree};
use crate::Result;

/// Relative slack for monotonicity and terminal equality.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub tree_digest: String,
    pub prefix_sizes: Vec<usize>,
    pub c_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub c_full: f64,
    pub b_full: f64,
    pub c_nondecreasing: bool,
    pub b_below_full: bool,
    pub terminal_match: bool,
    pub comparison_pairs: usize,
    /// Pairs with `nu_n(T) < nu(T_n)`.
    pub nu_violations: usize,
    /// Pairs with `mu_n(T*) > mu(T_n*)`.
    pub mu_violations: usize,
    /// Monotone `c`, terminal equality, `b_n <= b` on every prefix and both
    /// comparisons on every pair.
    pub pass: bool,
}

/// For each prefix, computes `b` and `c` of the truncated measures, and checks
/// `nu_n(T) >= nu(T_n)` and `mu_n(T*) <= mu(T_n*)` on `samples` random
/// admissible subtrees `T` of the truncated tree, `T_n` being its completion.
pub fn convergence_check(tree: &MeasuredTree<f64>, prefixes: &[Vec<usize>], samples: usize, seed: u64) -> Result<ConvergenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hc = hardy_c(tree)?;
    let hb = hardy_b(tree, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP)?;
    let mut c_values = Vec::new();
    let mut b_values = Vec::new();
    let mut prefix_sizes = Vec::new();
    let mut pairs = 0;
    let mut nu_violations = 0;
    let mut mu_violations = 0;
    for (k, prefix) in prefixes.iter().enumerate() {
        let (small, labels) = truncated_measures(tree, prefix)?;
        prefix_sizes.push(small.size());
        c_values.push(hardy_c(&small)?.c);
        b_values.push(hardy_b(&small, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP)?.value);
        let per_prefix = samples / prefixes.len() + usize::from(k < samples % prefixes.len());
        for _ in 0..per_prefix {
            let top = rng.random_range(1..small.size());
            let keep = rng.random_range(0.2..0.9);
            let t = random_admissible(&small, top, keep, &mut rng)?;
            let full_t = completion(tree, &labels, &small, &t)?;
            let nu_small = nu_functional(&small, &t);
            let nu_full = nu_functional(tree, &full_t);
            let mu_small = small.mu_of(&t_star(&small, &t));
            let mu_full = tree.mu_of(&t_star(tree, &full_t));
            pairs += 1;
            let slack = CONVERGENCE_TOLERANCE;
            nu_violations += usize::from(nu_small < nu_full * (1.0 - slack));
            mu_violations += usize::from(mu_small > mu_full * (1.0 + slack));
        }
    }
    let tol = |v: f64| CONVERGENCE_TOLERANCE * v.abs().max(1e-300);
    let c_nondecreasing = c_values.windows(2).all(|w| w[1] >= w[0] - tol(w[0]));
    let b_below_full = b_values.iter().all(|&b| b <= hb.value + tol(hb.value));
    let terminal_match = match (c_values.last(), b_values.last()) {
        (Some(&c), Some(&b)) => (c - hc.c).abs() <= tol(hc.c) && (b - hb.value).abs() <= tol(hb.value),
        _ => false,
    };
    let pass = c_nondecreasing && b_below_full && terminal_match && nu_violations == 0 && mu_violations == 0;
    Ok(ConvergenceReport {
        tree_digest: tree.digest(),
        prefix_sizes,
        c_values,
        b_values,
        c_full: hc.c,
        b_full: hb.value,
        c_nondecreasing,
        b_below_full,
        terminal_match,
        comparison_pairs: pairs,
        nu_violations,
        mu_violations,
        pass,
    })
}
