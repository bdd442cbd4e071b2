use thiserror::Error;

use crate::solver::TrajectoryRecord;

#[derive(Debug, Error)]
pub enum SqgError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The time integration stopped early. The partial record holds every
    /// sample taken before the abort.
    #[error("simulation aborted at t = {time}: {reason}")]
    Instability {
        time: f64,
        reason: String,
        partial: Box<TrajectoryRecord>,
    },

    /// The data are too large for the small-data theory to apply.
    #[error("smallness gate failed: ‖θ⁰‖_H^(2-2α) = {norm:.6e} is not below eps0 = {eps0:.6e}")]
    GateFailed { norm: f64, eps0: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SqgError>;
