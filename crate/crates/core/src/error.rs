use thiserror::Error;

/// Errors raised by the solvers, kernels and experiment driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FpError {
    /// A ratio numerator went negative or a denominator went nonpositive.
    #[error("domain error in {context}: {detail}")]
    Domain { context: String, detail: String },

    /// Sizes of vectors or matrices do not agree.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Cholesky factorization hit a nonpositive pivot, or the matrix is not Hermitian.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// Bisection could not find a sign change before the bracket cap.
    #[error("bracket error: no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    /// The starting point lies outside the feasible set.
    #[error("infeasible starting point: {0}")]
    Infeasible(String),

    /// The caller asked for an operation that is not defined for the given input.
    #[error("usage error: {0}")]
    Usage(String),

    /// Invalid configuration value, reported per field.
    #[error("config error at `{field}`: {detail}")]
    Config { field: String, detail: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl FpError {
    pub fn domain(context: impl Into<String>, detail: impl Into<String>) -> Self {
        FpError::Domain {
            context: context.into(),
            detail: detail.into(),
        }
    }

    pub fn config(field: impl Into<String>, detail: impl Into<String>) -> Self {
        FpError::Config {
            field: field.into(),
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for FpError {
    fn from(e: std::io::Error) -> Self {
        FpError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FpError>;
