use thiserror::Error;

/// Errors raised by the chain, metric, simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "truncation error: row {row} at u={u} loses mass {deficit:.3e} beyond the truncation level"
    )]
    Truncation { row: usize, u: f64, deficit: f64 },

    #[error("kernel is not ergodic: no power up to {max_power} has Dobrushin coefficient below 1")]
    NonErgodic { max_power: usize },

    #[error("certificate not found: {0}")]
    CertificateNotFound(String),

    #[error("drift condition violated: {inequality} fails at u={u} (state {state})")]
    F1Violation {
        inequality: &'static str,
        u: f64,
        state: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("model invalid: {0}")]
    ModelInvalid(String),

    #[error("support size {size} exceeds the oracle cap of {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("bandwidth too small: no design point within the window around u={u}")]
    BandwidthTooSmall { u: f64 },

    #[error("regression degenerate: {0}")]
    RegressionDegenerate(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("computation paths disagree: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
