//! Experiment plumbing: config files, table generators, the minibatch
//! gradient-variance protocol, envelope slices, and a vector smoothing utility.

mod envelope_slice;
mod experiment;
mod smooth_csv;
mod tables;
mod variance;

pub use envelope_slice::{envelope_slice, slice_to_csv, SliceRow};
pub use experiment::{
    drilled_start, run_experiment, CellResult, ExperimentConfig, ExperimentOutcome, MethodSpec,
    ProblemSpec, SUMMARY_HEADER,
};
pub use smooth_csv::{parse_vector_csv, smooth_csv, vector_to_csv, SmoothOutput};
pub use tables::{beta_table, var_bound_table};
pub use variance::{variance_protocol, VarianceProtocol, VarianceReport};

use thiserror::Error;

use crate::data_io::DataError;
use crate::optimizers::OptimizerError;
use crate::problems::ProblemError;
use crate::smoothing::SmoothingError;
use crate::theory::TheoryError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
}

impl HarnessError {
    /// Short machine-readable category for error reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config",
            HarnessError::Io { .. } => "io",
            HarnessError::Csv { .. } => "csv",
            HarnessError::Dataset(_) => "dataset",
            HarnessError::Theory(_) => "theory",
            HarnessError::Optimizer(_) => "optimizer",
            HarnessError::Problem(_) => "problem",
            HarnessError::Data(_) => "data",
            HarnessError::Smoothing(_) => "smoothing",
        }
    }
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::Io {
            path: parent.display().to_string(),
            message: e.to_string(),
        })?;
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
