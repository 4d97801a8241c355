//! Finite sub-Markovian generators: Dirichlet eigenvalues, Dirichlet-Cheeger
//! constants and their comparison, the two-layer counterexample family, and the
//! tree Cheeger computation on the Rado tree.

mod cheeger;
mod eigen;
mod families;
mod generator;
mod rado;
mod spanning;

pub use cheeger::{
    cheeger_constant, cheeger_sandwich_check, l1_characterization_check, l1_ratio, CheegerResult, CheegerStrategy,
    L1Report, SandwichReport, CHECK_TOLERANCE, MAX_EXHAUSTIVE_SIZE,
};
pub use eigen::{dirichlet_eigenvalue, rayleigh_quotient, symmetrized, EigenResult, MAX_DENSE_SIZE};
pub use families::{
    counterexample_eps, counterexample_generator, from_conductances, random_reversible_generator, random_tree_generator,
};
pub use generator::{EdgeMeasure, SubMarkovGenerator, FLOAT_TOLERANCE};
pub use rado::{pruned_tree_generator, tree_cheeger_rado, truncate_chain, truncate_chain_exact, TreeCheegerReport, Truncation};
pub use spanning::{
    enumerate_spanning_trees, matrix_tree_count, spanning_tree_iota_max, SpanningMode, SpanningTreeReport,
    MAX_EXHAUSTIVE_VERTICES,
};
