use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A field that cannot be processed, e.g. a nonpositive density.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Inconsistent or invalid configuration supplied by the caller.
    #[error("usage error: {0}")]
    Usage(String),

    /// A NaN or infinity appeared in a computed field.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("parse error at line {line}: {msg}\n    {context}")]
    Parse {
        line: usize,
        msg: String,
        context: String,
    },

    /// Parameters outside the admissibility window under an enforcing policy.
    #[error("not admissible: {0}")]
    Inadmissible(String),

    #[error("quadrature budget exhausted, partial estimate {estimate:e}")]
    QuadratureBudget { estimate: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    /// Process exit status used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse { .. } => 2,
            _ => 1,
        }
    }
}
