use thiserror::Error;

/// Errors raised by parameter handling and the numerical evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("missing configuration key `{0}`")]
    MissingKey(String),

    #[error("invalid parameters: {0}")]
    Validation(String),

    #[error(
        "{count} compositions of {total} into {parts} parts exceed the budget of {budget}; \
         reduce N or M_A, or use the pole-aggregated evaluator"
    )]
    Complexity {
        total: usize,
        parts: usize,
        count: u128,
        budget: u128,
    },

    #[error("quadrature did not converge on [{lo}, {hi}]: estimated error {achieved:e}")]
    Quadrature { lo: f64, hi: f64, achieved: f64 },

    #[error("coincident poles at rate {0:e}; partial fractions are degenerate")]
    DegeneratePole(f64),

    #[error("geometry error: {0}")]
    Geometry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
