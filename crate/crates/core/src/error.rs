use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hamiltonian has no terms")]
    EmptyHamiltonian,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sample spacing {got} does not match 1/omega_max = {expected}")]
    SpacingMismatch { expected: f64, got: f64 },
    #[error("wrong domain: expected a {expected} quantity")]
    WrongDomain { expected: &'static str },
    #[error("canonical frequency {0} lies outside [0, 1)")]
    FrequencyOutOfRange(f64),
    #[error("frequencies {0} and {1} are too close for a well-posed least-squares fit")]
    RankDeficient(f64, f64),
    #[error("gate-error scale estimate {0} is not usable")]
    BadScale(f64),
    #[error("reference spectrum is empty")]
    EmptyTruth,
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
