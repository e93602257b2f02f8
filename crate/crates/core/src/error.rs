use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("excitation count {k} out of range for {n} particles")]
    ExcitationOutOfRange { k: usize, n: usize },

    #[error("particle count must be at least 1")]
    EmptyRegister,

    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),

    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("scheme {scheme} incompatible with probe: {reason}")]
    IncompatibleScheme { scheme: String, reason: String },

    #[error("{0}")]
    Domain(String),
}
