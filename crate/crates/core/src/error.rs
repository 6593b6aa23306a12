use thiserror::Error;

use crate::picard::PicardDiagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    /// A homogeneous norm or multiplier of negative order was requested for a
    /// field whose zero mode is not zero; the value would be infinite.
    #[error("negative homogeneous order {order} applied to a field with non-zero mean")]
    NegativeOrderNonZeroMean { order: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("sample index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("velocity field is not divergence free (max relative defect {defect:.3e})")]
    NotDivergenceFree { defect: f64 },

    #[error("exponent 4/(2r-1) degenerates at r = {r}")]
    DegenerateExponent { r: f64 },

    #[error("exponent range violated: {0}")]
    BadExponentRange(String),

    #[error("parameters (r, s) = ({r}, {s}) are not admissible")]
    Inadmissible { r: f64, s: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Picard iteration did not converge after {} iterations", .0.iterations())]
    NotConverged(Box<PicardDiagnostics>),

    #[error("no admissible horizon on the dyadic ladder down to T = {smallest_t:e}: {blocking}")]
    NoAdmissibleT { smallest_t: f64, blocking: String },

    #[error("reference integrator unstable at step {step} (norm growth {growth:.3e})")]
    StepUnstable { step: usize, growth: f64 },

    #[error("trajectories do not share grid and time samples")]
    MismatchedTrajectories,
}
