use thiserror::Error;

/// Errors produced by the link models, the sampling engine and the config loader.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("2F1({a}, {b}; {c}; {z}) did not converge: {reason}")]
    Hypergeometric {
        a: f64,
        b: f64,
        c: f64,
        z: f64,
        reason: &'static str,
    },

    #[error("integration over [{lo}, {hi}] did not converge: estimate {estimate}, error {error_estimate} after {intervals} intervals")]
    Integration {
        lo: f64,
        hi: f64,
        estimate: f64,
        error_estimate: f64,
        intervals: usize,
    },

    #[error("quadrature order {order} not converged: {value} vs {reference} at order +10")]
    QuadratureConvergence {
        order: usize,
        value: f64,
        reference: f64,
    },

    #[error("config line {line}: {key}: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("invalid parameter {field}: {message}")]
    Validation { field: String, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn field_error(field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}
