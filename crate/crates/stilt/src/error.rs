//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by mesh construction, assembly, solvers and the
/// benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is out of range or inconsistent.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A point could not be located inside any mesh element.
    #[error("point ({0}, {1}, {2}) lies outside the mesh")]
    PointLocation(f64, f64, f64),

    /// A factorization failed (matrix singular or not positive definite).
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// An iterative solver did not reach its tolerance.
    #[error("{solver} did not converge within {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A dense eigendecomposition was requested above the dimension guard.
    #[error("spectral decomposition of dimension {dim} exceeds the guard {guard}")]
    EigenGuard { dim: usize, guard: usize },

    /// Dimension mismatch between operators and vectors.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// I/O failure while reading or writing artifacts.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wraps an I/O error with the path that produced it.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
