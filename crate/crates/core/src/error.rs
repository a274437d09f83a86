//! Error taxonomy shared across the crate.
//!
//! The CLI maps these onto exit codes: configuration and parameter-domain
//! problems are exit 2, numeric failures exit 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter violates an admissibility inequality.
    #[error("parameter domain: {0}")]
    ParameterDomain(String),

    /// Invalid grid, solver or estimator configuration.
    #[error("configuration: {0}")]
    Config(String),

    /// The requested object is not resolved on the grid.
    #[error("resolution: {0}")]
    Resolution(String),

    /// Quadrature or another numeric routine failed to converge.
    #[error("numeric: {0}")]
    Numeric(String),

    /// Covariance factorization found the matrix indefinite.
    #[error("factorization: {0}")]
    Factorization(String),

    /// Circulant embedding produced negative eigenvalues beyond tolerance.
    #[error(
        "circulant embedding indefinite (min eigenvalue {min_eigenvalue:.3e}); \
         retry with padding factor {suggested_padding}"
    )]
    Embedding {
        min_eigenvalue: f64,
        suggested_padding: usize,
    },

    /// The field left the finite range during time stepping.
    #[error("blow-up at step {step}: max |u| = {max_abs:.3e}")]
    BlowUp { step: u64, max_abs: f64 },

    /// A statistical test has no information to work with.
    #[error("degenerate test: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
