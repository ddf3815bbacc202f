//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by lifting, fitting, network and experiment routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A knot sequence violated `L >= 2` or strict monotonicity.
    #[error("invalid knot sequence: {0}")]
    InvalidKnots(String),

    /// A scalar input fell outside `[t_1, t_L]` and neither clamping nor extension was enabled.
    #[error("{value} lies outside the knot range [{lower}, {upper}]")]
    Domain { value: f64, lower: f64, upper: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("simplex {index} is numerically singular")]
    SingularSimplex { index: usize },

    #[error("point {point:?} is not contained in any simplex")]
    OutsideDomain { point: Vec<f64> },

    /// Invalid triangulation data (vertex indices out of range, wrong arity, degenerate simplex).
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// `backward` was called without a cached forward pass.
    #[error("invalid state: {0}")]
    State(String),

    #[error("could not move inputs away from kinks after {attempts} attempts")]
    RetryExhausted { attempts: usize },

    #[error("duplicate abscissa {0}")]
    DuplicateAbscissa(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
