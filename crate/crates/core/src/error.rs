use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    /// An input outside the construction's domain.
    #[error("{0}")]
    Precondition(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("potential has a pole in the box near {0}")]
    PoleInBox(String),
    #[error("eigensolver did not converge: residual {achieved:.3e} after {iterations} iterations")]
    NonConvergence { achieved: f64, iterations: usize },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
