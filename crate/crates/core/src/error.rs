use thiserror::Error;

use crate::divergences::DivergenceResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("cannot parse distribution literal `{literal}`: {reason}")]
    Parse { literal: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The error target was not met within the evaluation budget. `best`
    /// holds the value reached and an honest error bound for it.
    #[error("quadrature did not converge: value {} with error bound {}", best.value, best.abs_error_bound)]
    QuadratureNotConverged { best: DivergenceResult },

    #[error("unsupported distribution for {operation}: {detail}")]
    UnsupportedDistribution { operation: &'static str, detail: String },

    #[error("degenerate calibration: {0}")]
    DegenerateCalibration(String),

    #[error("sample budget exceeded: no n <= {cap} reached the error target")]
    BudgetExceeded { cap: usize },

    #[error("inequality `{inequality}` violated: {detail}")]
    AssertionFailure { inequality: String, detail: String },
}
