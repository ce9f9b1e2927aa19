//! Circulant Laplacian smoothing operators.
//!
//! A [`SmootherPlan`] fixes the dimension `m`, order `n` and strength `σ` and
//! caches the spectrum `λⱼ = 1 + 4ⁿσ sin²ⁿ(πj/m)` together with FFT plans, so
//! repeated smoothing of gradients of the same length is two transforms and a
//! pointwise division.

mod difference;
mod fft;
mod oracle;
mod plan;
mod stencil;

pub use difference::{backward_difference, forward_difference, laplacian_power};
pub use fft::{fourier_transform, inverse_fourier_transform};
pub use oracle::{dense_solve_oracle, DenseLu, DENSE_ORACLE_MAX_DIM};
pub(crate) use plan::closed_form_spectrum;
pub use plan::{Padding, SmootherPlan};
pub use stencil::Stencil;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothingError {
    #[error("smoothing order must be at least 1 (order 0 is the identity)")]
    ZeroOrder,
    #[error("sigma must be finite and nonnegative, got {0}")]
    InvalidSigma(f64),
    #[error("dimension {dim} is below the stencil width {required} and padding is disabled")]
    DimensionTooSmall { dim: usize, required: usize },
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("vector length {found} does not match plan dimension {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("inverse square root is only defined for order 1, plan has order {0}")]
    UnsupportedOrder(usize),
    #[error("spectrum check failed at index {index}: closed form {closed}, stencil transform {transformed}")]
    SpectrumMismatch {
        index: usize,
        closed: f64,
        transformed: f64,
    },
    #[error("dense oracle limited to dimension {limit}, got {dim}")]
    OracleTooLarge { dim: usize, limit: usize },
    #[error("dense factorization hit a zero pivot at column {0}")]
    SingularMatrix(usize),
}
