use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parse error at line {line}, position {position}: {message}")]
    Parse {
        line: usize,
        position: usize,
        message: String,
    },

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("operator is not anti-Hermitian: {0}")]
    NotAntiHermitian(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integral symmetry violated: {0}")]
    Symmetry(String),

    #[error("iterative eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("objective evaluated to NaN")]
    NotANumber,
}

impl Error {
    pub(crate) fn parse(line: usize, position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            position,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
