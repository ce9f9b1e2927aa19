use rand::Rng;
use rand_distr::StandardNormal;

use super::{GradientRng, Problem, ProblemError};

/// Adds `ε·N(0, I)` to the wrapped problem's stochastic gradient, drawn from
/// the noise stream so batch sampling is unaffected.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNoise<P> {
    inner: P,
    epsilon: f64,
}

impl<P: Problem> GaussianNoise<P> {
    pub fn new(inner: P, epsilon: f64) -> Self {
        Self { inner, epsilon }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Problem> Problem for GaussianNoise<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.inner.value(w)
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.inner.gradient(w)
    }

    fn stochastic_gradient(
        &self,
        w: &[f64],
        rng: &mut GradientRng,
        batch: usize,
    ) -> Result<Vec<f64>, ProblemError> {
        let mut g = self.inner.stochastic_gradient(w, rng, batch)?;
        if self.epsilon != 0.0 {
            for x in g.iter_mut() {
                let z: f64 = rng.noise.sample(StandardNormal);
                *x += self.epsilon * z;
            }
        }
        Ok(g)
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        self.inner.known_minimizer()
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        self.inner.lipschitz_constant()
    }

    fn num_samples(&self) -> Option<usize> {
        self.inner.num_samples()
    }
}
