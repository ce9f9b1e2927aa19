//! Gradient-based optimizers with optional Laplacian smoothing, step-size and
//! σ schedules, and a run driver that records per-iteration traces.

mod run;
mod schedule;
mod state;

pub use run::{run, Method, RunConfig, RunTrace, TraceRow};
pub use schedule::{sigma_schedule_step, Schedule, ScheduleKind};
pub use state::OptimizerState;

use thiserror::Error;

use crate::problems::ProblemError;
use crate::smoothing::SmoothingError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("expected a vector of length {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("gradient entry {index} is not finite")]
    NonFiniteGradient { index: usize },
    #[error("momentum must lie in [0, 1), got {0}")]
    InvalidMomentum(f64),
    #[error("decay rate must lie in (0, 1), got {0}")]
    InvalidDecay(f64),
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}
