//! Hardy inequalities on weighted trees, and the constants they yield for the
//! parent tree of the Rado graph.

mod constants;
mod convergence;
mod rado;
mod tree;

pub use constants::{
    hardy_b, hardy_c, hardy_ratio, hardy_sandwich, HardyB, HardyC, HardySandwich, TopScope, DEFAULT_ENUMERATION_CAP, MAX_C_VERTICES,
    SANDWICH_TOLERANCE,
};
pub use convergence::{convergence_check, ConvergenceReport, CONVERGENCE_TOLERANCE};
pub use rado::{
    b_vertex, gap_bounds, path_series, path_series_closed_form, path_sum, rado_hardy_bracket, rado_measured_tree,
    random_parent_chain, smallest_child_chain, GapBounds, HardyBracket, PathSeries, RadoTree, MAX_A_BREADTH, MAX_A_DEPTH,
    SERIES_CUTOFF, WEIGHT_FLOOR,
};
pub use tree::{
    admissible_subtrees, completion, nu_functional, random_admissible, random_measured_tree, random_prefix_chain, t_star,
    truncated_measures, AdmissibleSubtree, MeasuredTree,
};
