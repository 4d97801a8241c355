//! Ball walk on the Rado graph and on seeded `G(inf, p)` realizations.
//!
//! The walk moves from `i` to a neighbor `j` with probability `Q(j) / Q(N(i))`
//! for a summable weight `Q` on the naturals. This crate computes kernels and
//! the stationary measure exactly where possible, tracks truncation error
//! everywhere else, and checks the spectral-gap machinery (Dirichlet-Cheeger on
//! graphs, Hardy inequalities on trees) numerically.

pub mod chain;
pub mod error;
pub mod graph;
pub mod hardy;
pub mod measure;
pub mod numerics;
mod par;
pub mod report;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
