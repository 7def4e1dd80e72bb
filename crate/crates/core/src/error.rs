use thiserror::Error;

use crate::jacobian::JacobianError;
use crate::linalg::LinalgError;
use crate::options::OptionsError;

/// Failures that prevent a solve from starting or that are not representable
/// as a [`Termination`](crate::report::Termination) of a partial run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid options: {0}")]
    Options(#[from] OptionsError),
    #[error("initial guess has length {actual}, system dimension is {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("residual is not finite at the initial guess")]
    NonFiniteInitialResidual,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
    #[error("invalid problem parameters: {0}")]
    Problem(String),
}
