use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside the allowed range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {node} does not exist in a network of {node_count} nodes")]
    UnknownNode { node: u32, node_count: u32 },

    #[error("cannot place {edges} edges on {nodes} nodes (at most {max} are possible)")]
    InfeasibleEdgeCount { nodes: u32, edges: u64, max: u64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge on [{lower}, {upper}]: error estimate {estimate:e} exceeds tolerance {tolerance:e} after {subdivisions} subdivisions"
    )]
    NotConverged {
        lower: f64,
        upper: f64,
        estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Tolerance used when range-checking fidelities and probabilities.
pub(crate) const RANGE_TOLERANCE: f64 = 1e-12;

pub(crate) fn check_range(what: &'static str, value: f64, min: f64, max: f64) -> Result<f64> {
    if value.is_finite() && value >= min - RANGE_TOLERANCE && value <= max + RANGE_TOLERANCE {
        Ok(value.clamp(min, max))
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            min,
            max,
        })
    }
}
