use thiserror::Error;

/// Errors raised by the model primitives, the solvers and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter lies outside the admissible region of the model.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs violate a validity condition of a closed form (for example
    /// `p2 <= a` for the region masses).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterative solver hit its iteration cap.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A bracketing method found no sign change where one must exist.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// The grid best-response dynamic cycles even after step refinement.
    #[error("grid dynamic entered a 2-cycle at step {step:e}")]
    GridCycle { step: f64 },
}

impl ModelError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        ModelError::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        ModelError::Precondition(msg.into())
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
