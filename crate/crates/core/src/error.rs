use thiserror::Error;

/// Errors produced by the analytic engine and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested target does not lie between the bracket endpoints.
    #[error("bracket error: target {target} not bracketed by f({lo}) and f({hi})")]
    Bracket { target: f64, lo: f64, hi: f64 },
    /// A transfer coefficient request that no physical strategy can satisfy.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Teleporter gain G = 1 makes the optimal gain undefined.
    #[error("degenerate gain: lambda_opt is undefined at pump gain G = 1")]
    DegenerateGain,
    /// Caller violated an interface contract (mismatched lengths, empty input).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A filesystem read or write failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn from_io(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }

    /// Process exit code under the 0/2/3/4 contract: I/O failures map to
    /// 3, everything else here is a domain or degeneracy error (4).
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
