use thiserror::Error;

pub type Result<T> = std::result::Result<T, LrvError>;

#[derive(Debug, Error)]
pub enum LrvError {
    #[error("series length {n} is too short (need at least {min})")]
    InvalidLength { n: usize, min: usize },

    #[error("bandwidth m = {m} outside [1, {max}]")]
    BandwidthOutOfRange { m: usize, max: usize },

    #[error("bandwidth must be at least 1, got {0}")]
    InvalidBandwidth(usize),

    #[error("non-finite value at index {index}")]
    NonFiniteInput { index: usize },

    #[error("lag {lag} out of range for series of length {n}")]
    LagOutOfRange { lag: i64, n: usize },

    #[error("all periodogram ordinates are zero")]
    DegenerateOrdinates,

    #[error("invalid search interval [{lower}, {upper}]; need 0 < lower < upper < 1")]
    InvalidBounds { lower: f64, upper: f64 },

    #[error("spectral density at zero must be positive, got {0}")]
    InvalidF0(f64),

    #[error("break index {n_hat} outside [1, {max}]")]
    BreakOutOfRange { n_hat: usize, max: usize },

    #[error("significance level {0} outside (0, 1)")]
    InvalidAlpha(f64),

    #[error("invalid lag window: {0}")]
    InvalidWindow(String),

    #[error("invalid process specification: {0}")]
    InvalidSpec(String),

    #[error("need at least {min} replications, got {reps}")]
    InsufficientReps { reps: usize, min: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LrvError {
    /// True for errors caused by user-supplied configuration or input files
    /// rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            LrvError::Config(_) | LrvError::Parse { .. } | LrvError::Io(_) | LrvError::InvalidSpec(_)
        )
    }
}
