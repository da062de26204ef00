use thiserror::Error;

use crate::numerics::GridFunction;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite input in {0}")]
    NonFiniteInput(&'static str),

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    /// The theory rules out a positive solution for this input.
    #[error("no positive solution: {0}")]
    NoPositiveSolution(String),

    /// The input lies outside the regime where the solution is well defined.
    #[error("degenerate parameters: {0}")]
    ParameterDegenerate(String),

    #[error("{what} did not converge after {iterations} iterations")]
    ConvergenceFailure {
        what: &'static str,
        iterations: usize,
        last: Option<Box<GridFunction>>,
    },

    #[error("uniqueness probe failed: {0}")]
    ProbeFailure(String),
}

impl Error {
    /// True for inputs the theory forbids rather than numerical failures.
    pub fn is_theory_forbidden(&self) -> bool {
        matches!(
            self,
            Error::NoPositiveSolution(_) | Error::ParameterDegenerate(_)
        )
    }

    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure { .. } | Error::ProbeFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
