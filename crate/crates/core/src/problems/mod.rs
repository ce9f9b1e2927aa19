//! Objective functions with exact gradients, stochastic gradient sources, and
//! the Hopf-Lax envelope / implicit smoothed step.

mod envelope;
mod finite_sum;
mod noise;
mod objectives;

pub use envelope::{
    hopf_lax_envelope, hopf_lax_envelope_from, implicit_ls_step, EnvelopeQuery, EnvelopeResult,
};
pub use finite_sum::{FindCenter, SoftmaxRegression};
pub use noise::GaussianNoise;
pub use objectives::{DenseQuadratic, DiagonalQuadratic, DrilledHoles, NormSin, Rosenbrock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::smoothing::SmoothingError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("expected a vector of length {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("batch size must be positive")]
    ZeroBatch,
    #[error("batch size {batch} exceeds dataset size {samples}")]
    BatchTooLarge { batch: usize, samples: usize },
    #[error("invalid problem dimension {0}")]
    InvalidDimension(usize),
    #[error("label {label} outside 0..{classes}")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("envelope time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("inner solve stopped after {iterations} iterations with gradient norm {residual:e}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
}

/// Randomness owned by a single run: batch index sampling and additive
/// gradient noise draw from separate streams so either can be ablated.
#[derive(Debug, Clone)]
pub struct GradientRng {
    pub sampling: ChaCha8Rng,
    pub noise: ChaCha8Rng,
}

impl GradientRng {
    pub fn new(seed: u64) -> Self {
        Self::from_stream(seed, 0)
    }

    /// Independent generator pair number `stream` under the same seed, for
    /// fanning work out without sharing state.
    pub fn from_stream(seed: u64, stream: u64) -> Self {
        let mut sampling = ChaCha8Rng::seed_from_u64(seed);
        sampling.set_stream(2 * stream);
        let mut noise = ChaCha8Rng::seed_from_u64(seed);
        noise.set_stream(2 * stream + 1);
        Self { sampling, noise }
    }
}

/// A differentiable objective `F(w)`, optionally a finite sum `(1/N) Σ fᵢ(w)`.
pub trait Problem: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, w: &[f64]) -> f64;

    fn gradient(&self, w: &[f64]) -> Vec<f64>;

    /// Unbiased estimate of [`Problem::gradient`]. Deterministic problems
    /// ignore `batch` and return the exact gradient.
    fn stochastic_gradient(
        &self,
        w: &[f64],
        _rng: &mut GradientRng,
        _batch: usize,
    ) -> Result<Vec<f64>, ProblemError> {
        self.check_len(w)?;
        Ok(self.gradient(w))
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        None
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        None
    }

    /// Number of summands for finite-sum problems.
    fn num_samples(&self) -> Option<usize> {
        None
    }

    fn check_len(&self, w: &[f64]) -> Result<(), ProblemError> {
        if w.len() != self.dim() {
            return Err(ProblemError::LengthMismatch {
                expected: self.dim(),
                found: w.len(),
            });
        }
        Ok(())
    }
}

impl<P: Problem + ?Sized> Problem for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        (**self).value(w)
    }
    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        (**self).gradient(w)
    }
    fn stochastic_gradient(
        &self,
        w: &[f64],
        rng: &mut GradientRng,
        batch: usize,
    ) -> Result<Vec<f64>, ProblemError> {
        (**self).stochastic_gradient(w, rng, batch)
    }
    fn known_minimizer(&self) -> Option<Vec<f64>> {
        (**self).known_minimizer()
    }
    fn lipschitz_constant(&self) -> Option<f64> {
        (**self).lipschitz_constant()
    }
    fn num_samples(&self) -> Option<usize> {
        (**self).num_samples()
    }
}

/// Central differences with `h = 1e-5·(1+|wᵢ|)`; used by tests as the gradient oracle.
pub fn finite_difference_gradient<P: Problem + ?Sized>(problem: &P, w: &[f64]) -> Vec<f64> {
    let mut x = w.to_vec();
    (0..w.len())
        .map(|i| {
            let h = 1e-5 * (1.0 + w[i].abs());
            x[i] = w[i] + h;
            let up = problem.value(&x);
            x[i] = w[i] - h;
            let down = problem.value(&x);
            x[i] = w[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}
