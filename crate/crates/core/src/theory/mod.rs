//! Closed-form constants and bounds for Laplacian smoothing, with independent
//! numerical checks (brute-force sums, Monte-Carlo, dense eigensolves).

mod beta;
mod bounds;
mod eigen;
mod sampling;

pub use beta::{compute_beta, BetaResult};
pub use bounds::{ratio_tail_bound, ratio_tail_threshold, variance_ratio_bound, VarianceBound};
pub use eigen::{eigen_product_check, majorization_slack, EigenProductReport, EIGEN_CHECK_MAX_DIM};
pub use sampling::{empirical_variance_ratio, monte_carlo_ratio, RatioSummary};

use thiserror::Error;

use crate::smoothing::SmoothingError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("sigma must be finite and nonnegative, got {0}")]
    InvalidSigma(f64),
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("alpha {alpha} is not above the admissible threshold {threshold}")]
    OutsideDomain { alpha: f64, threshold: f64 },
    #[error("dimension {0} must exceed π² for the concentration bound")]
    DimensionTooSmall(usize),
    #[error("condition number must be at least 1, got {0}")]
    InvalidConditionNumber(f64),
    #[error("variances must be positive and finite")]
    NonPositiveVariance,
    #[error("need at least {required} samples, got {found}")]
    TooFewSamples { required: usize, found: usize },
    #[error("matrix size {0} exceeds the dense eigensolve limit")]
    TooLarge(usize),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
}

pub(crate) fn check_sigma(sigma: f64) -> Result<(), TheoryError> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(TheoryError::InvalidSigma(sigma));
    }
    Ok(())
}
