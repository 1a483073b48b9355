use thiserror::Error;

/// Errors raised by the analysis and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The simultaneous root iteration did not reach the requested tolerance.
    #[error("root finder did not converge after {iterations} iterations (worst scaled residual {worst_residual:e})")]
    RootsNotConverged { iterations: usize, worst_residual: f64 },

    /// A local problem or change of variables is singular for these parameters.
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    /// Invalid discretisation or decomposition setup.
    #[error("configuration error: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
