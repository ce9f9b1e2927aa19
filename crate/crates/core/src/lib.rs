//! Laplacian-smoothed gradient descent.
//!
//! The core operation multiplies a (stochastic) gradient by the inverse of the
//! circulant matrix `A = I + (-1)^n σ Lⁿ`, where `L` is the periodic
//! one-dimensional discrete Laplacian acting on parameter indices. The inverse
//! is diagonal in the Fourier basis, so each smoothing costs two FFTs.
//!
//! Crate layout:
//!
//! - [`smoothing`]: stencils, spectra, and the FFT-based forward / inverse /
//!   inverse-square-root operators, with a dense solver used as a test oracle.
//! - [`theory`]: closed-form constants (β, the ℓ₂ concentration bound, the
//!   variance-reduction bound) and their brute-force / Monte-Carlo checks.
//! - [`optimizers`]: GD/SGD and their smoothed variants, Nesterov, RMSProp,
//!   LS-RMSProp, Adam, schedules, and the run driver producing a [`RunTrace`].
//! - [`problems`]: benchmark objectives with exact gradients, stochastic
//!   gradient sources, and the Hopf-Lax envelope / implicit smoothed step.
//! - [`data_io`]: IDX loading, subsampling, class filtering, synthetic data.
//! - [`harness`]: experiment configs, table generators, the stochastic-gradient
//!   variance protocol, and envelope slices.
//!
//! [`RunTrace`]: optimizers::RunTrace

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data_io;
pub mod harness;
pub mod optimizers;
pub mod problems;
pub mod smoothing;
pub mod theory;

pub use optimizers::{Method, OptimizerState, RunConfig, RunTrace, Schedule};
pub use problems::{GradientRng, Problem};
pub use smoothing::{Padding, SmootherPlan, SmoothingError, Stencil};
