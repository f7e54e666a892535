use thiserror::Error;

/// Errors raised by constructors, kernels and solvers in this crate.
///
/// Non-convergence of an iterative method is *not* an error; it is reported
/// through [`crate::solvers::SolverOutcome::converged`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid order {0}: tensors must have order >= 3")]
    Order(usize),

    #[error("not stochastic: {0}")]
    NotStochastic(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("column {code} has zero sum and cannot be normalized")]
    ZeroColumn { code: usize },

    #[error("reduced chain needs {states} states, above the guard of {limit}")]
    SizeGuard { states: usize, limit: usize },

    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("singular linear system at iteration {iteration}")]
    SingularSystem { iteration: usize },

    #[error("projection of nonpositive vector at iteration {iteration}")]
    NonpositiveProjection { iteration: usize },

    #[error("inner solve failed to converge at outer iteration {iteration}")]
    InnerSolve { iteration: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("unknown problem {0:?}")]
    UnknownProblem(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
