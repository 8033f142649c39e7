use thiserror::Error;

/// Errors raised by the numerical kernels, the system model and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside the domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParam { name: &'static str, detail: String },

    #[error("scale b requires at least two users, got N = {0}")]
    DegenerateN(u32),

    #[error("rank k = {k} exceeds the number of users N = {n}")]
    RankExceedsUsers { k: u32, n: u32 },

    #[error("at least {min} trials are required, got {got}")]
    TooFewTrials { min: u64, got: u64 },

    #[error("quadrature did not reach the requested accuracy: estimate {estimate:e}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
