use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("weight exponent a = {0} is not integrable near x = 0 (need 2a > -1)")]
    NonIntegrableWeight(f64),

    #[error("domain has no interior grid nodes")]
    EmptyDomain,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("conjugate gradient did not converge: {iterations} iterations, relative residual {residual:.3e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("nonlinearity violates ({property}) at (x, y, xi) = ({x}, {y}, {xi}): {detail}")]
    NonlinearityViolation {
        property: &'static str,
        x: f64,
        y: f64,
        xi: f64,
        detail: String,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
