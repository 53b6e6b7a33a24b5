use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid subsystem dimension {0}: every slot needs at least 2 levels")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("slot {slot} is out of range for a {slots}-slot space")]
    InvalidSlot { slot: usize, slots: usize },

    #[error("signature is not (cavity, phonon, qubit) with a 2-level qubit")]
    NotHybrid,

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state has squared norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("density matrix has trace {0}, expected 1")]
    TraceNotUnity(f64),

    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),

    #[error("operation needs a density matrix, got a pure state")]
    ExpectedMixed,

    #[error("degenerate spectrum at t = {t}: eigenvalue gap {gap:e}")]
    Degenerate { t: f64, gap: f64 },

    #[error("cannot fix eigenvector phase: anchor component {0:e}")]
    Gauge(f64),

    #[error("finite-difference derivative unstable under step halving: drift {0:e}")]
    DerivativeDrift(f64),

    #[error("time step too large: dt·‖H‖ = {0} (must be < 0.1)")]
    StepTooLarge(f64),

    #[error("empty or reversed time span [{0}, {1}]")]
    InvalidSpan(f64, f64),

    #[error("norm drift {drift:e} at t = {t}: reduce dt")]
    NormDrift { t: f64, drift: f64 },

    #[error("trace drift {drift:e} at t = {t}: reduce dt")]
    TraceDrift { t: f64, drift: f64 },

    #[error("Hermitian symmetrization correction {correction:e} at t = {t}")]
    SymmetrizationDrift { t: f64, correction: f64 },

    #[error("positivity violated at t = {t}: minimum eigenvalue {min:e}")]
    Positivity { t: f64, min: f64 },

    #[error("integration diverged (non-finite state) at t = {0}")]
    Divergence(f64),
}
