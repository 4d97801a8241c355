//! Weight families, neighborhood masses, the stationary measure and tree measures.

mod neighborhood;
mod stationary;
mod weights;

pub use neighborhood::{
    q_neighborhood_exact, q_neighborhood_f64, NeighborhoodMass, NeighborhoodMode, BLOCK_MATERIALIZE_BITS,
    REMAINDER_EXPONENT_CAP,
};
pub use stationary::{mu_vertex, mu_vertex_f64, nu_edge, nu_edge_f64, stationary, stationary_exact, StationaryResult};
pub use weights::{WeightFamily, WeightValue};
