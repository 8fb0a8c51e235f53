use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count must be at least 1")]
    ZeroModes,

    #[error("mode index {index} out of range for {modes} mode(s)")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("two-mode operation needs two distinct modes, got {0} twice")]
    SameMode(usize),

    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid Gaussian state: {0}")]
    InvalidState(String),

    #[error("invalid scheme configuration: {0}")]
    InvalidConfig(String),

    #[error("state is not pure (residual {residual:.3e}); use the noisy QFI formula")]
    NotPure { residual: f64 },

    #[error("covariance matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("QFI trace has a non-negligible imaginary part {imag:.3e}")]
    ComplexTrace { imag: f64 },

    #[error("oscillation period not resolved within {max_loops} loops")]
    PeriodNotResolved { max_loops: usize },

    #[error("Fock cutoff {cutoff} too small: truncation leakage {leakage:.3e}")]
    CutoffTooSmall { cutoff: usize, leakage: f64 },

    #[error("Fock space of {required} amplitudes exceeds budget of {budget}")]
    FockBudget { required: usize, budget: usize },
}
