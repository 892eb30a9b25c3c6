use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("symmetry violated: {0}")]
    Symmetry(String),

    #[error("positive-definiteness violated: {0}")]
    Definiteness(String),

    #[error("state is not pure: {0}")]
    NotPure(String),

    #[error("stability error: {0}")]
    Stability(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short invariant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::Arity(_) => "arity",
            Error::Dimension(_) => "dimension",
            Error::Symmetry(_) => "symmetry",
            Error::Definiteness(_) => "positive-definiteness",
            Error::NotPure(_) => "purity",
            Error::Stability(_) => "stability",
            Error::Parameter(_) => "parameter",
            Error::NonFinite(_) => "finiteness",
            Error::Parse(_) => "parse",
        }
    }
}
