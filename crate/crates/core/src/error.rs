//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("valuation of zero")]
    ValuationOfZero,

    #[error("cannot factorize zero")]
    FactorizeZero,

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular curve (discriminant is zero)")]
    SingularCurve,

    #[error("point is not on the curve: {0}")]
    NotOnCurve(String),

    #[error("degenerate central periods: stacked real period matrix is singular")]
    DegenerateCentralPeriods,

    #[error("unnormalized third-kind differential: relative real part {ratio:.3e} exceeds {tolerance:.1e}")]
    UnnormalizedThirdKind { ratio: f64, tolerance: f64 },

    #[error("ill-conditioned normalization system for the third-kind differential")]
    IllConditionedNormalization,

    #[error("supports overlap; use the regularized pairing")]
    OverlappingSupports,

    #[error("divisor has nonzero degree {0}")]
    NonzeroDegree(i64),

    #[error("unsupported reduction at p = {prime}: Kodaira type {kind}")]
    UnsupportedReduction { prime: String, kind: String },

    #[error("model is not minimal at p = {0}")]
    NonMinimal(String),

    #[error("coordinate function {name} does not vanish to order one at the point (order {order})")]
    BadLocalCoordinate { name: String, order: i64 },

    #[error("no auxiliary points found within the search bound")]
    AuxiliarySearchFailed,

    #[error("{what} did not converge (residual {residual:.3e})")]
    NonConvergent { what: String, residual: f64 },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { field: field.into(), message: message.into() }
    }

    pub fn non_convergent(what: impl Into<String>, residual: f64) -> Self {
        Error::NonConvergent { what: what.into(), residual }
    }

    /// Process exit status for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergent { .. } | Error::IllConditionedNormalization => 3,
            _ => 2,
        }
    }
}
