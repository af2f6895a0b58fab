//! Error type shared across the simulator.

use thiserror::Error;

/// Crate-wide error enumeration.
///
/// Variants map one-to-one onto the rejection paths of the public
/// operations; everything carries enough context to be actionable
/// from a CLI exit message.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NonHermitian { asymmetry: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("duration must be positive, got {value}")]
    NonPositiveDuration { value: f64 },

    #[error("gate fraction must lie in [0, 1], got {value}")]
    FractionOutOfRange { value: f64 },

    #[error("time {t} outside schedule range [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("dimension must be 2 or 4, got {dim}")]
    BadDimension { dim: usize },

    #[error("state norm deviates from 1 by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("unknown gate `{name}`")]
    UnknownGate { name: String },

    #[error("invalid circuit: {reason}")]
    InvalidCircuit { reason: String },

    #[error("residual global phase {residual:.3e} rad cannot be scheduled")]
    UnschedulablePhase { residual: f64 },

    #[error("quadrature self-test residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureNonConvergence { residual: f64, tolerance: f64 },

    #[error(
        "oracle coupling misses target (residual {residual:.3e}); \
         constants solving the moment system: A={a:.12}, B={b:.12}, C={c:.12}"
    )]
    OracleConstantsMismatch { residual: f64, a: f64, b: f64, c: f64 },

    #[error("ambiguous readout: |displacement| {displacement:.3e} below threshold {threshold:.3e}")]
    AmbiguousReadout { displacement: f64, threshold: f64 },

    #[error("trajectory {trajectory} hit a wavefunction node at t = {t:.6e}")]
    NodeEncounter { trajectory: usize, t: f64 },

    #[error("point ({x}, {y}) outside the well domain [0,1]^2")]
    OutOfDomain { x: f64, y: f64 },

    #[error("custom density places mass where the pilot wave vanishes (density {density:.3e} at sampled point)")]
    SupportViolation { density: f64 },

    #[error("invalid sampler: {reason}")]
    InvalidSampler { reason: String },

    #[error("unsupported state for this operation: {reason}")]
    UnsupportedState { reason: String },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
