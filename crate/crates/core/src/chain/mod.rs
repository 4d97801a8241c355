//! The ball-walk kernel, exact and float evolution, total variation, mixing and drift.

mod distribution;
mod drift;
mod evolve;
mod kernel;
mod reversibility;

pub use distribution::{tv_distance, SparseDistribution, TvInterval};
pub use drift::{
    drift_ceiling, drift_expectation, drift_sweep, prob_above_parent_exact, DriftContext, DriftEstimate, DriftSweep,
};
pub use evolve::{
    evolve, evolve_exact, mixing_time, step, step_exact, tv_decay_curve, DecayFit, FloatChain, MixingTime,
    StationaryReference, TvCurve, TvEngine, TvPoint,
};
pub use kernel::{kernel_row, kernel_row_exact, ExactKernelRow, KernelRow};
pub use reversibility::{check_reversibility, ReversibilityReport};

/// Default window for TV curves.
pub const DEFAULT_CURVE_CAP: u64 = 1 << 10;
/// Default window for walks started at tower states.
pub const DEFAULT_TOWER_CAP: u64 = 1 << 17;
