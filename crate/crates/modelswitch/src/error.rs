//! Crate-wide error type.
//!
//! Errors are grouped by the exit code the CLI maps them to: configuration
//! problems (2), data/IO problems (3) and numerical failures (4).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or missing input data.
    #[error("data error: {0}")]
    Data(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Non-finite value where a finite one is required.
    #[error("input domain error: {0}")]
    InputDomain(String),

    /// Normal-equation system could not be factorized at rho = 0.
    #[error("ill-conditioned design: factorization failed at pivot {rank} of {dim}")]
    IllConditioned { rank: usize, dim: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Drifted portfolio weights lost a positive normalizer.
    #[error("degenerate portfolio at period {period}: drift normalizer {normalizer}")]
    DegeneratePortfolio { period: usize, normalizer: f64 },

    /// Reward undefined (log utility at or below total loss).
    #[error("reward domain error: net return {net} not above -1 under log utility")]
    RewardDomain { net: f64 },

    /// A solver failure inside fitted Q-iteration, with context attached.
    #[error("fqi solver failure at iteration {iteration}, action {action}: {source}")]
    FqiSolve {
        iteration: usize,
        action: String,
        #[source]
        source: Box<Error>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Exit code for the CLI: 2 config, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Io { .. } => 3,
            Error::InputDomain(_)
            | Error::IllConditioned { .. }
            | Error::DimensionMismatch(_)
            | Error::DegeneratePortfolio { .. }
            | Error::RewardDomain { .. }
            | Error::FqiSolve { .. }
            | Error::Numerical(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}
