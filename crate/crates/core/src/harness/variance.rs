use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::HarnessError;
use crate::data_io::LabeledDataset;
use crate::problems::{GradientRng, Problem, SoftmaxRegression};
use crate::smoothing::SmootherPlan;

/// Settings of the minibatch gradient-variance measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProtocol {
    pub batch_sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
    /// Number of points on the full-batch descent path.
    pub path_length: usize,
    pub path_lr: f64,
    /// Minibatch draws per (path point, batch size, σ).
    pub replicas: usize,
    /// Standard deviation of the Gaussian initial weights.
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for VarianceProtocol {
    fn default() -> Self {
        Self {
            batch_sizes: vec![2, 5, 10, 20, 50],
            sigmas: vec![0.0, 1.0, 2.0, 3.0],
            path_length: 20,
            path_lr: 0.5,
            replicas: 100,
            init_scale: 0.01,
            seed: 0,
        }
    }
}

/// Largest per-coordinate variance of the (smoothed) minibatch gradient over
/// all coordinates and path points; `max_variance[s][b]` is for
/// `sigmas[s]`, `batch_sizes[b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub batch_sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub max_variance: Vec<Vec<f64>>,
    pub path_length: usize,
    pub replicas: usize,
}

impl VarianceReport {
    pub fn value(&self, sigma_index: usize, batch_index: usize) -> f64 {
        self.max_variance[sigma_index][batch_index]
    }

    /// `max_variance[a][b] / max_variance[c][b]` for every batch size.
    pub fn ratios(&self, numerator: usize, denominator: usize) -> Vec<f64> {
        self.max_variance[numerator]
            .iter()
            .zip(&self.max_variance[denominator])
            .map(|(a, b)| a / b)
            .collect()
    }

    /// Rows σ, columns batch size.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma");
        for b in &self.batch_sizes {
            let _ = write!(out, ",batch={b}");
        }
        out.push('\n');
        for (s, row) in self.sigmas.iter().zip(&self.max_variance) {
            let _ = write!(out, "{s}");
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// For each σ: runs full-batch (LS-)GD on binary softmax regression to get a
/// descent path; at each path point draws `replicas` minibatch gradients per
/// batch size, smooths them with the same σ, and measures each coordinate's
/// mean squared deviation from the smoothed full gradient. Reports the max
/// over coordinates and path points.
///
/// Work is split per (σ, batch, path point) with its own generator stream, so
/// results do not depend on thread scheduling.
pub fn variance_protocol(
    dataset: &LabeledDataset,
    protocol: &VarianceProtocol,
) -> Result<VarianceReport, HarnessError> {
    if dataset.num_classes != 2 {
        return Err(HarnessError::Dataset(format!(
            "expected 2 classes, found {}",
            dataset.num_classes
        )));
    }
    if protocol.replicas < 2 {
        return Err(HarnessError::Config(format!(
            "replicas must be at least 2, got {}",
            protocol.replicas
        )));
    }
    if protocol.path_length == 0 || protocol.batch_sizes.is_empty() || protocol.sigmas.is_empty() {
        return Err(HarnessError::Config(
            "path length, batch sizes and sigmas must be nonempty".into(),
        ));
    }
    let problem = SoftmaxRegression::new(
        dataset.features.clone(),
        dataset.feature_dim,
        dataset.labels.clone(),
        2,
        0.0,
    )?;
    let dim = problem.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(protocol.seed);
    let w0: Vec<f64> = (0..dim)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            protocol.init_scale * z
        })
        .collect();

    let nb = protocol.batch_sizes.len();
    let np = protocol.path_length;
    let mut max_variance = Vec::with_capacity(protocol.sigmas.len());
    for (si, &sigma) in protocol.sigmas.iter().enumerate() {
        let plan = SmootherPlan::new(dim, 1, sigma)?;
        let mut path = Vec::with_capacity(np);
        let mut w = w0.clone();
        for _ in 0..np {
            let d = plan.apply_inverse(&problem.gradient(&w))?;
            path.push(w.clone());
            w.iter_mut()
                .zip(&d)
                .for_each(|(x, g)| *x -= protocol.path_lr * g);
        }
        let cells: Vec<f64> = (0..nb * np)
            .into_par_iter()
            .map(|cell| {
                let (bi, pi) = (cell / np, cell % np);
                let stream = ((si * nb + bi) * np + pi) as u64 + 1;
                let mut rng = GradientRng::from_stream(protocol.seed, stream);
                let point = &path[pi];
                let mean = plan.apply_inverse(&problem.gradient(point))?;
                let mut sq = vec![0.0; dim];
                for _ in 0..protocol.replicas {
                    let g =
                        problem.stochastic_gradient(point, &mut rng, protocol.batch_sizes[bi])?;
                    let g = plan.apply_inverse(&g)?;
                    for ((s, x), m) in sq.iter_mut().zip(&g).zip(&mean) {
                        *s += (x - m).powi(2);
                    }
                }
                let reps = protocol.replicas as f64;
                Ok(sq.into_iter().fold(0.0, |a, s| f64::max(a, s / reps)))
            })
            .collect::<Result<_, HarnessError>>()?;
        max_variance.push(
            cells
                .chunks(np)
                .map(|c| c.iter().cloned().fold(0.0, f64::max))
                .collect(),
        );
    }
    Ok(VarianceReport {
        batch_sizes: protocol.batch_sizes.clone(),
        sigmas: protocol.sigmas.clone(),
        max_variance,
        path_length: np,
        replicas: protocol.replicas,
    })
}
