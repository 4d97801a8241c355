//! Adjacency oracles: the binary Rado graph and seeded `G(inf, p)` realizations.

mod event_b;
mod oracle;
mod tree;

pub use event_b::{check_event_b, estimate_prob_b, prob_b_product, prob_b_series, EventBReport, ProbBEstimate};
pub use oracle::{CommonNeighbor, GraphModel, GraphOracle, VertexId, Witness, PARENT_SCAN_LIMIT};
pub use tree::{
    find_lowerbound_sequence, parent_growth_scan, verify_tree, GrowthReport, LowerBoundSequence, TreeReport,
};
