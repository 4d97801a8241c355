use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generator::SubMarkovGenerator;
use crate::numerics::ExactRational;
use crate::{Error, Result};

/// The two-layer family: `n` states per layer, rate `eps` across layers, killing
/// rate one on layer 0, uniform `pi`. States `0..n` are layer 0, `n..2n` layer 1.
pub fn counterexample_generator(n: usize, eps: &ExactRational) -> Result<SubMarkovGenerator<ExactRational>> {
    if n == 0 || !eps.is_positive() {
        return Err(Error::Domain("need n >= 1 and eps > 0".into()));
    }
    let n_eps = eps * &ExactRational::from(n as u64);
    if n_eps >= ExactRational::ratio(1, 2) {
        return Err(Error::Domain(format!("n * eps = {n_eps} must be below 1/2")));
    }
    let size = 2 * n;
    let mut rates = vec![vec![ExactRational::zero(); size]; size];
    for x in 0..size {
        for y in 0..size {
            if (x < n) != (y < n) {
                rates[x][y] = eps.clone();
            }
        }
        rates[x][x] = if x < n { -(&n_eps + &ExactRational::one()) } else { -n_eps.clone() };
    }
    SubMarkovGenerator::new(rates, vec![ExactRational::one(); size])
}

/// `eps = 1/(4n)`, the member of the family with Cheeger constant 1/4.
pub fn counterexample_eps(n: usize) -> ExactRational {
    ExactRational::ratio(1, 4 * n as i64)
}

/// Random symmetric conductances over a spanning path plus extra edges with
/// probability `density`, random positive `pi`, and killing on a random nonempty subset.
pub fn random_reversible_generator(n: usize, density: f64, seed: u64) -> Result<SubMarkovGenerator<f64>> {
    if n == 0 || !(0.0..=1.0).contains(&density) {
        return Err(Error::Domain("need n >= 1 and density in [0,1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let mut cond = vec![vec![0.0; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for w in order.windows(2) {
        let c = rng.random_range(0.05..1.0);
        cond[w[0]][w[1]] = c;
        cond[w[1]][w[0]] = c;
    }
    for x in 0..n {
        for y in (x + 1)..n {
            if cond[x][y] == 0.0 && rng.random_bool(density) {
                let c = rng.random_range(0.05..1.0);
                cond[x][y] = c;
                cond[y][x] = c;
            }
        }
    }
    let mut kill: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.3) { rng.random_range(0.05..1.0) } else { 0.0 }).collect();
    if kill.iter().all(|k| *k == 0.0) {
        kill[rng.random_range(0..n)] = rng.random_range(0.05..1.0);
    }
    Ok(from_conductances(&cond, &kill, pi)?)
}

/// A random tree of conductances with killing only at vertex 0, so the subtree
/// strategy is exact.
pub fn random_tree_generator(n: usize, seed: u64) -> Result<SubMarkovGenerator<f64>> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let mut cond = vec![vec![0.0; n]; n];
    for x in 1..n {
        let p = rng.random_range(0..x);
        let c = rng.random_range(0.05..1.0);
        cond[x][p] = c;
        cond[p][x] = c;
    }
    let mut kill = vec![0.0; n];
    kill[0] = rng.random_range(0.05..1.0);
    from_conductances(&cond, &kill, pi)
}

/// `L(x,y) = c(x,y) / pi(x)`, killing `k(x) / pi(x)`.
pub fn from_conductances(cond: &[Vec<f64>], kill: &[f64], pi: Vec<f64>) -> Result<SubMarkovGenerator<f64>> {
    let n = pi.len();
    let mut rates = vec![vec![0.0; n]; n];
    for x in 0..n {
        let mut out = kill[x];
        for y in (0..n).filter(|&y| y != x) {
            rates[x][y] = cond[x][y] / pi[x];
            out += cond[x][y];
        }
        rates[x][x] = -out / pi[x];
    }
    SubMarkovGenerator::new(rates, pi)
}
