use std::fmt;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),
    /// A sampled function produced a non-finite value.
    #[error("evaluation error at {}: {msg}", Coords(.coords))]
    Evaluation { coords: Vec<f64>, msg: String },
    /// A construction could not satisfy its calibration constraints.
    #[error("construction error: {0}")]
    Construction(String),
    /// Quadrature failed to stabilise under refinement.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    /// Malformed configuration or serialized input.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

struct Coords<'a>(&'a [f64]);

impl fmt::Display for Coords<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
