use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no convergence in {context}: best estimate {estimate:e}, error estimate {err_est:e}")]
    NonConvergence {
        context: String,
        estimate: f64,
        err_est: f64,
    },
    #[error("overflow evaluating {0}")]
    Overflow(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("potential is not analytic at the origin")]
    NotAnalytic,
    #[error("operation requires a square barrier potential")]
    WrongVariant,
    #[error("unknown ordering rule `{0}`")]
    UnknownRule(String),
    #[error("invalid ordering rule: {0}")]
    InvalidRule(String),
    #[error("derivative unavailable: {0}")]
    DerivativeUnavailable(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("distribution has no unique maximum")]
    FlatDistribution,
    #[error("captured norm {0:.6} is below 0.99")]
    InsufficientCapture(f64),
}

impl Error {
    pub(crate) fn nonconv(context: impl Into<String>, estimate: f64, err_est: f64) -> Self {
        Error::NonConvergence {
            context: context.into(),
            estimate,
            err_est,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
