//! Exact and error-bounded arithmetic, iterated logarithms, towers, partitions.

mod interval;
mod logstar;
mod partitions;
mod rational;
mod scalar;
mod series;
mod symbolic;
mod tower;

pub use interval::ErrorBoundedReal;
pub use logstar::{critical_base, fixed_point_residual, fixed_points, log_star, log_star_pow2, LogStarConvention, FIXED_POINT_SLACK};
pub use partitions::{partition_log_upper, partition_numbers, MAX_PARTITION_INDEX};
pub use rational::ExactRational;
pub use scalar::Scalar;
pub use series::{
    block_mass_exact, block_mass_f64, exact_power, geometric_block_sum, geometric_tail_exact,
    geometric_tail_f64, pow2_power, zeta, EXACT_BIT_BUDGET,
};
pub use symbolic::{Poly, SymbolicRational};
pub use tower::{tower, tower_u64, TowerValue, MAX_TOWER_HEIGHT};
