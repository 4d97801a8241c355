use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::generator::SubMarkovGenerator;
use crate::numerics::Scalar;
use crate::{Error, Result};

/// Largest generator handled by the dense solver.
pub const MAX_DENSE_SIZE: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub lambda: f64,
    /// `|S v - lambda v| / |v|` for the symmetrized matrix `S`.
    pub residual: f64,
    /// Ground state in symmetric coordinates (`v = sqrt(pi) f`).
    pub ground_state: Vec<f64>,
}

/// `D^{1/2} (-L) D^{-1/2}`, built from `sqrt(L(x,y) L(y,x))` so no absolute `pi` is needed.
pub fn symmetrized<S: Scalar>(l: &SubMarkovGenerator<S>) -> DMatrix<f64> {
    let n = l.size();
    DMatrix::from_fn(n, n, |x, y| {
        if x == y {
            -l.rate(x, x).to_f64()
        } else {
            -(l.rate(x, y).to_f64() * l.rate(y, x).to_f64()).sqrt()
        }
    })
}

/// Smallest eigenvalue of `-L`.
pub fn dirichlet_eigenvalue<S: Scalar>(l: &SubMarkovGenerator<S>) -> Result<EigenResult> {
    let n = l.size();
    if n > MAX_DENSE_SIZE {
        return Err(Error::Domain(format!("{n} states exceed the dense limit {MAX_DENSE_SIZE}")));
    }
    let s = symmetrized(l);
    let eig = SymmetricEigen::new(s.clone());
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Domain("empty generator".into()))?;
    let v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    let residual = (&s * &v - &v * lambda).norm() / v.norm();
    // fix the sign so the ground state is mostly nonnegative
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    Ok(EigenResult { lambda, residual, ground_state: v.iter().map(|c| c * sign).collect() })
}

/// `-pi[f L f] / pi[f^2]` for a function `f` in ordinary coordinates.
pub fn rayleigh_quotient(l: &SubMarkovGenerator<f64>, f: &[f64]) -> f64 {
    let n = l.size();
    let pi = l.pi();
    let mut num = 0.0;
    let mut den = 0.0;
    for x in 0..n {
        let lf: f64 = (0..n).map(|y| l.rate(x, y) * f[y]).sum();
        num -= pi[x] * f[x] * lf;
        den += pi[x] * f[x] * f[x];
    }
    num / den
}
