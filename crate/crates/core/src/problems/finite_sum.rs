use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{GradientRng, Problem, ProblemError};

/// Draws `batch` indices uniformly with replacement. Returns `None` when the
/// batch covers the whole dataset, in which case callers use the exact gradient.
fn sample_batch(
    rng: &mut GradientRng,
    batch: usize,
    samples: usize,
) -> Result<Option<Vec<usize>>, ProblemError> {
    if batch == 0 {
        return Err(ProblemError::ZeroBatch);
    }
    if batch > samples {
        return Err(ProblemError::BatchTooLarge { batch, samples });
    }
    if batch == samples {
        return Ok(None);
    }
    Ok(Some(
        (0..batch)
            .map(|_| rng.sampling.random_range(0..samples))
            .collect(),
    ))
}

/// `F(w) = (1/N) Σᵢ ‖xᵢ − w‖²`, minimized at the mean of the points.
#[derive(Debug, Clone, PartialEq)]
pub struct FindCenter {
    dim: usize,
    points: Vec<f64>,
    mean: Vec<f64>,
}

impl FindCenter {
    /// `points` is row-major, one point per row of length `dim`.
    pub fn new(points: Vec<f64>, dim: usize) -> Result<Self, ProblemError> {
        if dim == 0 {
            return Err(ProblemError::InvalidDimension(0));
        }
        if points.is_empty() {
            return Err(ProblemError::EmptyDataset);
        }
        if !points.len().is_multiple_of(dim) {
            return Err(ProblemError::LengthMismatch {
                expected: dim * (points.len() / dim + 1),
                found: points.len(),
            });
        }
        let n = points.len() / dim;
        let mut mean = vec![0.0; dim];
        for row in points.chunks_exact(dim) {
            mean.iter_mut().zip(row).for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        Ok(Self { dim, points, mean })
    }

    /// Standard normal points.
    pub fn random(num_points: usize, dim: usize, seed: u64) -> Result<Self, ProblemError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..num_points * dim)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        Self::new(points, dim)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `∇fᵢ(w) = 2(w − xᵢ)`
    pub fn component_gradient(&self, w: &[f64], i: usize) -> Vec<f64> {
        let row = &self.points[i * self.dim..(i + 1) * self.dim];
        w.iter().zip(row).map(|(a, b)| 2.0 * (a - b)).collect()
    }
}

impl Problem for FindCenter {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        let n = self.points.len() / self.dim;
        self.points
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(w).map(|(x, y)| (x - y).powi(2)).sum::<f64>())
            .sum::<f64>()
            / n as f64
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        w.iter()
            .zip(&self.mean)
            .map(|(a, m)| 2.0 * (a - m))
            .collect()
    }

    fn stochastic_gradient(
        &self,
        w: &[f64],
        rng: &mut GradientRng,
        batch: usize,
    ) -> Result<Vec<f64>, ProblemError> {
        self.check_len(w)?;
        let Some(idx) = sample_batch(rng, batch, self.points.len() / self.dim)? else {
            return Ok(self.gradient(w));
        };
        let mut centre = vec![0.0; self.dim];
        for &i in &idx {
            let row = &self.points[i * self.dim..(i + 1) * self.dim];
            centre.iter_mut().zip(row).for_each(|(c, x)| *c += x);
        }
        let b = idx.len() as f64;
        Ok(w.iter()
            .zip(&centre)
            .map(|(a, c)| 2.0 * (a - c / b))
            .collect())
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(self.mean.clone())
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        Some(2.0)
    }

    fn num_samples(&self) -> Option<usize> {
        Some(self.points.len() / self.dim)
    }
}

/// Multinomial logistic regression with mean cross-entropy and an optional
/// `(λ/2)‖W‖²` penalty on the non-bias weights.
///
/// Parameters are a `(d+1) × K` row-major matrix: row `j < d` holds the weights
/// of feature `j` for every class, the last row holds the biases.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxRegression {
    features: Vec<f64>,
    feature_dim: usize,
    labels: Vec<usize>,
    num_classes: usize,
    l2_penalty: f64,
}

impl SoftmaxRegression {
    pub fn new(
        features: Vec<f64>,
        feature_dim: usize,
        labels: Vec<usize>,
        num_classes: usize,
        l2_penalty: f64,
    ) -> Result<Self, ProblemError> {
        if feature_dim == 0 || num_classes < 2 {
            return Err(ProblemError::InvalidDimension(feature_dim.min(num_classes)));
        }
        if labels.is_empty() {
            return Err(ProblemError::EmptyDataset);
        }
        if features.len() != labels.len() * feature_dim {
            return Err(ProblemError::LengthMismatch {
                expected: labels.len() * feature_dim,
                found: features.len(),
            });
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(ProblemError::LabelOutOfRange {
                label,
                classes: num_classes,
            });
        }
        Ok(Self {
            features,
            feature_dim,
            labels,
            num_classes,
            l2_penalty,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.feature_dim..(i + 1) * self.feature_dim]
    }

    fn logits(&self, w: &[f64], x: &[f64]) -> Vec<f64> {
        let k = self.num_classes;
        let mut z = w[self.feature_dim * k..].to_vec();
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                z.iter_mut()
                    .zip(&w[j * k..(j + 1) * k])
                    .for_each(|(zc, wc)| *zc += xj * wc);
            }
        }
        z
    }

    /// Returns `(−log pᵧ, p)` with a max-shifted softmax.
    fn sample_loss(&self, w: &[f64], i: usize) -> (f64, Vec<f64>) {
        let z = self.logits(w, self.row(i));
        let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = z.iter().map(|v| (v - zmax).exp()).collect();
        let total: f64 = exp.iter().sum();
        let loss = total.ln() + zmax - z[self.labels[i]];
        (loss, exp.into_iter().map(|e| e / total).collect())
    }

    fn penalty(&self, w: &[f64]) -> f64 {
        let body = &w[..self.feature_dim * self.num_classes];
        0.5 * self.l2_penalty * body.iter().map(|x| x * x).sum::<f64>()
    }

    fn batch_gradient(
        &self,
        w: &[f64],
        idx: impl Iterator<Item = usize>,
        count: usize,
    ) -> Vec<f64> {
        let k = self.num_classes;
        let d = self.feature_dim;
        let mut g = vec![0.0; (d + 1) * k];
        for i in idx {
            let (_, mut r) = self.sample_loss(w, i);
            r[self.labels[i]] -= 1.0;
            for (j, &xj) in self.row(i).iter().enumerate() {
                if xj != 0.0 {
                    g[j * k..(j + 1) * k]
                        .iter_mut()
                        .zip(&r)
                        .for_each(|(gc, rc)| *gc += xj * rc);
                }
            }
            g[d * k..].iter_mut().zip(&r).for_each(|(gc, rc)| *gc += rc);
        }
        let scale = 1.0 / count as f64;
        g.iter_mut().for_each(|x| *x *= scale);
        for (gc, wc) in g[..d * k].iter_mut().zip(w) {
            *gc += self.l2_penalty * wc;
        }
        g
    }

    pub fn predict(&self, w: &[f64], x: &[f64]) -> usize {
        let z = self.logits(w, x);
        (0..z.len())
            .max_by(|&a, &b| z[a].total_cmp(&z[b]).then(b.cmp(&a)))
            .unwrap_or(0)
    }

    /// Fraction of training samples classified correctly.
    pub fn accuracy(&self, w: &[f64]) -> f64 {
        let correct = (0..self.labels.len())
            .filter(|&i| self.predict(w, self.row(i)) == self.labels[i])
            .count();
        correct as f64 / self.labels.len() as f64
    }
}

impl Problem for SoftmaxRegression {
    fn dim(&self) -> usize {
        (self.feature_dim + 1) * self.num_classes
    }

    fn value(&self, w: &[f64]) -> f64 {
        let n = self.labels.len();
        let ce: f64 = (0..n).map(|i| self.sample_loss(w, i).0).sum();
        ce / n as f64 + self.penalty(w)
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let n = self.labels.len();
        self.batch_gradient(w, 0..n, n)
    }

    fn stochastic_gradient(
        &self,
        w: &[f64],
        rng: &mut GradientRng,
        batch: usize,
    ) -> Result<Vec<f64>, ProblemError> {
        self.check_len(w)?;
        match sample_batch(rng, batch, self.labels.len())? {
            None => Ok(self.gradient(w)),
            Some(idx) => Ok(self.batch_gradient(w, idx.iter().copied(), idx.len())),
        }
    }

    fn num_samples(&self) -> Option<usize> {
        Some(self.labels.len())
    }
}

#[cfg(test)]
mod tests {
    use super::super::finite_difference_gradient;
    use super::*;

    #[test]
    fn find_center_basics() {
        let p = FindCenter::random(40, 5, 3).unwrap();
        let mu = p.known_minimizer().unwrap();
        assert!(p.gradient(&mu).iter().all(|g| g.abs() < 1e-14));
        let spread: f64 = p
            .points()
            .chunks_exact(5)
            .map(|r| r.iter().zip(&mu).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum::<f64>()
            / 40.0;
        assert!((p.value(&mu) - spread).abs() < 1e-12);
        let w = vec![0.3; 5];
        let mut rng = GradientRng::new(1);
        assert_eq!(
            p.stochastic_gradient(&w, &mut rng, 40).unwrap(),
            p.gradient(&w)
        );
        assert_eq!(
            p.stochastic_gradient(&w, &mut rng, 0),
            Err(ProblemError::ZeroBatch)
        );
        assert!(matches!(
            p.stochastic_gradient(&w, &mut rng, 41),
            Err(ProblemError::BatchTooLarge { .. })
        ));
    }

    #[test]
    fn find_center_unbiased_by_enumeration() {
        let p = FindCenter::random(25, 4, 9).unwrap();
        let w = [0.5, -1.0, 2.0, 0.0];
        let mut avg = [0.0; 4];
        for i in 0..25 {
            avg.iter_mut()
                .zip(p.component_gradient(&w, i))
                .for_each(|(a, g)| *a += g / 25.0);
        }
        let g = p.gradient(&w);
        assert!(avg.iter().zip(&g).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    fn toy(n: usize, d: usize, k: usize, l2: f64) -> SoftmaxRegression {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let features = (0..n * d).map(|_| rng.random_range(0.0..1.0)).collect();
        let labels = (0..n).map(|i| i % k).collect();
        SoftmaxRegression::new(features, d, labels, k, l2).unwrap()
    }

    #[test]
    fn softmax_at_zero() {
        let p = toy(20, 4, 3, 0.0);
        let w = vec![0.0; p.dim()];
        assert!((p.value(&w) - 3f64.ln()).abs() < 1e-14);
        let single = SoftmaxRegression::new(vec![2.0, -1.0], 2, vec![0], 2, 0.0).unwrap();
        let g = single.gradient(&[0.0; 6]);
        assert_eq!(g, vec![-1.0, 1.0, 0.5, -0.5, -0.5, 0.5]);
    }

    #[test]
    fn softmax_gradient_matches_differences() {
        let p = toy(20, 4, 3, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let w: Vec<f64> = (0..p.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let g = p.gradient(&w);
            let fd = finite_difference_gradient(&p, &w);
            let err: f64 = g
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-6 * g.iter().map(|a| a * a).sum::<f64>().sqrt().max(1.0));
        }
    }

    #[test]
    fn softmax_stochastic_mean() {
        let p = toy(10, 3, 2, 0.05);
        let w: Vec<f64> = (0..p.dim()).map(|i| 0.1 * i as f64 - 0.3).collect();
        let mut rng = GradientRng::new(4);
        let draws = 20_000;
        let mut avg = vec![0.0; p.dim()];
        for _ in 0..draws {
            let g = p.stochastic_gradient(&w, &mut rng, 2).unwrap();
            avg.iter_mut()
                .zip(g)
                .for_each(|(a, x)| *a += x / draws as f64);
        }
        let exact = p.gradient(&w);
        assert!(avg.iter().zip(&exact).all(|(a, b)| (a - b).abs() < 0.01));
    }

    #[test]
    fn softmax_rejects_bad_labels() {
        assert_eq!(
            SoftmaxRegression::new(vec![0.0; 4], 2, vec![0, 3], 3, 0.0),
            Err(ProblemError::LabelOutOfRange {
                label: 3,
                classes: 3
            })
        );
    }
}
