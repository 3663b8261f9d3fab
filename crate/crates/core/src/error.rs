use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("no feasible served-user count for L={l}, G={g}, t={t}")]
    Infeasible { l: usize, g: usize, t: usize },

    #[error("MAC region too large: m_k = {0} exceeds the limit of 12")]
    TooManyMacSubsets(usize),

    #[error("solver failure: {reason}")]
    SolverFailure { reason: String, best: Option<Box<crate::multicast::CovarianceSet>> },

    #[error("degenerate trial: transmission {transmission} has zero rate")]
    DegenerateTrial { transmission: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
