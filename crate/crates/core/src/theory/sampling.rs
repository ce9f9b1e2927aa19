use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{check_sigma, TheoryError};
use crate::smoothing::SmootherPlan;

/// Minimum draws accepted by [`monte_carlo_ratio`].
pub const MIN_RATIO_SAMPLES: usize = 100;
/// Minimum draws accepted by [`empirical_variance_ratio`].
pub const MIN_VARIANCE_SAMPLES: usize = 1000;

/// Draws are grouped in fixed-size chunks so partial sums do not depend on
/// how rayon schedules work.
const CHUNK: usize = 64;

/// Empirical distribution of `‖M_σ v‖ / ‖v‖` over random directions.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub sigma: f64,
    pub m: usize,
    pub samples: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub alphas: Vec<f64>,
    /// Fraction of draws with ratio `≥ α`, one per entry of `alphas`.
    pub exceedance: Vec<f64>,
}

/// Independent generator for draw `index`: same key, distinct stream.
fn draw_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn gaussian_vec(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.sample(StandardNormal)).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Samples `v` uniformly on the unit sphere (normalized Gaussians; the ratio is
/// scale-invariant so the radius is irrelevant) and summarizes `‖M_σ v‖/‖v‖`.
pub fn monte_carlo_ratio(
    sigma: f64,
    m: usize,
    samples: usize,
    seed: u64,
    alphas: &[f64],
) -> Result<RatioSummary, TheoryError> {
    check_sigma(sigma)?;
    if samples < MIN_RATIO_SAMPLES {
        return Err(TheoryError::TooFewSamples {
            required: MIN_RATIO_SAMPLES,
            found: samples,
        });
    }
    let plan = SmootherPlan::new(m, 1, sigma)?;
    let ratios = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = draw_rng(seed, i);
            let v = gaussian_vec(&mut rng, m);
            let mv = plan.apply_inverse_sqrt(&v)?;
            Ok(norm(&mv) / norm(&v))
        })
        .collect::<Result<Vec<f64>, TheoryError>>()?;

    let n = samples as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let exceedance = alphas
        .iter()
        .map(|&a| ratios.iter().filter(|&&r| r >= a).count() as f64 / n)
        .collect();
    Ok(RatioSummary {
        sigma,
        m,
        samples,
        mean,
        std: var.sqrt(),
        min: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        max: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        alphas: alphas.to_vec(),
        exceedance,
    })
}

#[derive(Clone)]
struct Moments {
    raw_sum: Vec<f64>,
    raw_sq: Vec<f64>,
    smooth_sum: Vec<f64>,
    smooth_sq: Vec<f64>,
}

impl Moments {
    fn zeros(m: usize) -> Self {
        Self {
            raw_sum: vec![0.0; m],
            raw_sq: vec![0.0; m],
            smooth_sum: vec![0.0; m],
            smooth_sq: vec![0.0; m],
        }
    }

    fn add(&mut self, raw: &[f64], smooth: &[f64]) {
        for i in 0..raw.len() {
            self.raw_sum[i] += raw[i];
            self.raw_sq[i] += raw[i] * raw[i];
            self.smooth_sum[i] += smooth[i];
            self.smooth_sq[i] += smooth[i] * smooth[i];
        }
    }

    fn merge(mut self, other: &Self) -> Self {
        for (a, b) in [
            (&mut self.raw_sum, &other.raw_sum),
            (&mut self.raw_sq, &other.raw_sq),
            (&mut self.smooth_sum, &other.smooth_sum),
            (&mut self.smooth_sq, &other.smooth_sq),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }
}

fn summed_variance(sum: &[f64], sq: &[f64], n: f64) -> f64 {
    sum.iter()
        .zip(sq)
        .map(|(s, q)| (q - s * s / n) / (n - 1.0))
        .sum()
}

/// Draws `n ~ N(0, diag(variances))` (identity when `None`), smooths each draw
/// with `(Aⁿ_σ)⁻¹`, and returns `Σᵢ Var[smoothed]ᵢ / Σᵢ Var[n]ᵢ` using sample
/// variances on both sides.
pub fn empirical_variance_ratio(
    n: usize,
    sigma: f64,
    m: usize,
    variances: Option<&[f64]>,
    samples: usize,
    seed: u64,
) -> Result<f64, TheoryError> {
    check_sigma(sigma)?;
    if samples < MIN_VARIANCE_SAMPLES {
        return Err(TheoryError::TooFewSamples {
            required: MIN_VARIANCE_SAMPLES,
            found: samples,
        });
    }
    let scales: Vec<f64> = match variances {
        Some(v) => {
            if v.len() != m {
                return Err(crate::smoothing::SmoothingError::LengthMismatch {
                    expected: m,
                    found: v.len(),
                }
                .into());
            }
            if v.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(TheoryError::NonPositiveVariance);
            }
            v.iter().map(|x| x.sqrt()).collect()
        }
        None => vec![1.0; m],
    };
    let plan = SmootherPlan::new(m, n, sigma)?;
    let chunks = samples.div_ceil(CHUNK);
    let partials = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::zeros(m);
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let mut rng = draw_rng(seed, i);
                let mut noise = gaussian_vec(&mut rng, m);
                noise.iter_mut().zip(&scales).for_each(|(x, s)| *x *= s);
                let smooth = plan.apply_inverse(&noise)?;
                acc.add(&noise, &smooth);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<Moments>, TheoryError>>()?;
    let total = partials
        .iter()
        .fold(Moments::zeros(m), |acc, p| acc.merge(p));
    let count = samples as f64;
    Ok(summed_variance(&total.smooth_sum, &total.smooth_sq, count)
        / summed_variance(&total.raw_sum, &total.raw_sq, count))
}
