use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid resonance r/q = {r}/{q}: q must exceed 2 after reduction")]
    InvalidResonance { r: u64, q: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("adiabatic validity violated: {bound} = {value:.4e} (limit {limit:.4e})")]
    AdiabaticValidity {
        bound: &'static str,
        value: f64,
        limit: f64,
    },

    #[error(
        "truncation error: {what} = {value:.3e} exceeds {limit:.1e}; \
         increase the Fock dimension to at least {suggested_dim}"
    )]
    Truncation {
        what: &'static str,
        value: f64,
        limit: f64,
        suggested_dim: usize,
    },

    #[error(
        "tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} sweeps"
    )]
    Eigensolver { index: usize, iterations: usize },

    #[error("orbit does not close after {period} steps (distance {distance:.3e}, tolerance {tolerance:.1e})")]
    NotPeriodic {
        period: usize,
        distance: f64,
        tolerance: f64,
    },

    #[error(
        "kick index {n} is near-singular for overlap reconstruction (|cos 2phi| = {det:.3e}); \
         skip or interpolate this index"
    )]
    SingularKickIndex { n: u64, det: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator parameters differ: {0}")]
    IncompatibleOperators(String),

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("internal consistency: {what} = {value} outside [0, 1]")]
    Consistency { what: &'static str, value: f64 },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user-supplied configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidParameter { .. }
                | Error::InvalidResonance { .. }
                | Error::AdiabaticValidity { .. }
                | Error::Empty(_)
        )
    }
}
