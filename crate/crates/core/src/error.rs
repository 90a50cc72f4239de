use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A negative power or quotient needed the inverse of a non-invertible
    /// leading coefficient.
    #[error("division by non-unit: {0}")]
    DivisionByNonunit(String),

    /// The requested information lies beyond the known precision of a series.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// Two series live on incompatible exponent lattices.
    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),

    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
