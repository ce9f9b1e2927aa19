use super::{OptimizerError, Schedule};
use crate::smoothing::SmootherPlan;

/// Iterate plus the auxiliary buffers the update rules need.
///
/// Buffers are created lazily (zeros) by the first step that uses them.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    weights: Vec<f64>,
    iteration: usize,
    momentum_buffer: Option<Vec<f64>>,
    second_moment: Option<Vec<f64>>,
    first_moment: Option<Vec<f64>>,
    smoother: Option<SmootherPlan>,
    sigma_schedule: Option<Schedule>,
}

fn check_eta(eta: f64) -> Result<(), OptimizerError> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(OptimizerError::InvalidStep(eta));
    }
    Ok(())
}

fn check_unit_open(x: f64) -> Result<(), OptimizerError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(OptimizerError::InvalidDecay(x));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<(), OptimizerError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(OptimizerError::InvalidEpsilon(eps));
    }
    Ok(())
}

impl OptimizerState {
    pub fn new(weights: Vec<f64>) -> Self {
        Self {
            weights,
            iteration: 0,
            momentum_buffer: None,
            second_moment: None,
            first_moment: None,
            smoother: None,
            sigma_schedule: None,
        }
    }

    /// Attaches a fixed smoother.
    pub fn with_smoother(mut self, plan: SmootherPlan) -> Result<Self, OptimizerError> {
        self.check_len(plan.dim())?;
        self.smoother = Some(plan);
        Ok(self)
    }

    /// Attaches a σ schedule; the smoother is rebuilt by [`Self::sync_sigma`]
    /// whenever the scheduled σ changes.
    pub fn with_sigma_schedule(
        mut self,
        schedule: Schedule,
        order: usize,
    ) -> Result<Self, OptimizerError> {
        schedule.validate(true)?;
        self.smoother = Some(SmootherPlan::new(
            self.weights.len(),
            order,
            schedule.value_at(self.iteration),
        )?);
        self.sigma_schedule = Some(schedule);
        Ok(self)
    }

    /// Rebuilds the smoother if the σ schedule moved at the current iteration.
    pub fn sync_sigma(&mut self) -> Result<(), OptimizerError> {
        let (Some(schedule), Some(plan)) = (&self.sigma_schedule, &self.smoother) else {
            return Ok(());
        };
        let sigma = schedule.value_at(self.iteration);
        if sigma != plan.sigma() {
            self.smoother = Some(SmootherPlan::new(self.weights.len(), plan.order(), sigma)?);
        }
        Ok(())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn momentum_buffer(&self) -> Option<&[f64]> {
        self.momentum_buffer.as_deref()
    }

    pub fn second_moment(&self) -> Option<&[f64]> {
        self.second_moment.as_deref()
    }

    pub fn first_moment(&self) -> Option<&[f64]> {
        self.first_moment.as_deref()
    }

    pub fn smoother(&self) -> Option<&SmootherPlan> {
        self.smoother.as_ref()
    }

    /// σ of the attached smoother, `0` when there is none.
    pub fn sigma(&self) -> f64 {
        self.smoother.as_ref().map_or(0.0, SmootherPlan::sigma)
    }

    fn check_len(&self, len: usize) -> Result<(), OptimizerError> {
        if len != self.weights.len() {
            return Err(OptimizerError::LengthMismatch {
                expected: self.weights.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// `A_σ⁻¹ g` with the attached smoother (identity without one), after
    /// checking the length and that every entry is finite.
    pub fn smooth(&self, gradient: &[f64]) -> Result<Vec<f64>, OptimizerError> {
        self.check_len(gradient.len())?;
        if let Some(index) = gradient.iter().position(|g| !g.is_finite()) {
            return Err(OptimizerError::NonFiniteGradient { index });
        }
        match &self.smoother {
            Some(plan) => Ok(plan.apply_inverse(gradient)?),
            None => Ok(gradient.to_vec()),
        }
    }

    /// Point at which Nesterov's gradient is evaluated: `w + μ·buffer`.
    pub fn lookahead(&self, momentum: f64) -> Vec<f64> {
        match &self.momentum_buffer {
            Some(buf) => self
                .weights
                .iter()
                .zip(buf)
                .map(|(w, b)| w + momentum * b)
                .collect(),
            None => self.weights.clone(),
        }
    }

    /// `w ← w − η A_σ⁻¹ g`
    pub fn lsgd_step(&mut self, gradient: &[f64], eta: f64) -> Result<(), OptimizerError> {
        check_eta(eta)?;
        let d = self.smooth(gradient)?;
        self.descend(&d, eta);
        Ok(())
    }

    pub(crate) fn descend(&mut self, smoothed: &[f64], eta: f64) {
        self.weights
            .iter_mut()
            .zip(smoothed)
            .for_each(|(w, d)| *w -= eta * d);
        self.iteration += 1;
    }

    /// `buffer ← μ·buffer − η A_σ⁻¹ g`, `w ← w + buffer`, with `g` taken at
    /// [`Self::lookahead`].
    pub fn nesterov_step(
        &mut self,
        gradient_at_lookahead: &[f64],
        eta: f64,
        momentum: f64,
    ) -> Result<(), OptimizerError> {
        check_eta(eta)?;
        check_momentum(momentum)?;
        let d = self.smooth(gradient_at_lookahead)?;
        self.momentum_update(&d, eta, momentum);
        Ok(())
    }

    pub(crate) fn momentum_update(&mut self, smoothed: &[f64], eta: f64, momentum: f64) {
        let buf = self
            .momentum_buffer
            .get_or_insert_with(|| vec![0.0; smoothed.len()]);
        for ((b, d), w) in buf.iter_mut().zip(smoothed).zip(self.weights.iter_mut()) {
            *b = momentum * *b - eta * d;
            *w += *b;
        }
        self.iteration += 1;
    }

    /// RMSProp on the smoothed gradient `g_σ`: `s ← ρs + (1−ρ)g_σ²`,
    /// `w ← w − η g_σ / (√s + ε)`.
    pub fn ls_rmsprop_step(
        &mut self,
        gradient: &[f64],
        eta: f64,
        decay: f64,
        epsilon: f64,
    ) -> Result<(), OptimizerError> {
        check_eta(eta)?;
        check_unit_open(decay)?;
        check_epsilon(epsilon)?;
        let d = self.smooth(gradient)?;
        self.rmsprop_update(&d, eta, decay, epsilon);
        Ok(())
    }

    pub(crate) fn rmsprop_update(&mut self, smoothed: &[f64], eta: f64, decay: f64, epsilon: f64) {
        let s = self
            .second_moment
            .get_or_insert_with(|| vec![0.0; smoothed.len()]);
        for ((si, d), w) in s.iter_mut().zip(smoothed).zip(self.weights.iter_mut()) {
            *si = decay * *si + (1.0 - decay) * d * d;
            *w -= eta * d / (si.sqrt() + epsilon);
        }
        self.iteration += 1;
    }

    /// Bias-corrected Adam on the raw gradient; no smoothing.
    pub fn adam_step(
        &mut self,
        gradient: &[f64],
        eta: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Result<(), OptimizerError> {
        check_eta(eta)?;
        check_unit_open(beta1)?;
        check_unit_open(beta2)?;
        check_epsilon(epsilon)?;
        self.check_len(gradient.len())?;
        if let Some(index) = gradient.iter().position(|g| !g.is_finite()) {
            return Err(OptimizerError::NonFiniteGradient { index });
        }
        self.adam_update(gradient, eta, beta1, beta2, epsilon);
        Ok(())
    }

    pub(crate) fn adam_update(
        &mut self,
        gradient: &[f64],
        eta: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) {
        let n = gradient.len();
        let t = (self.iteration + 1) as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        let m = self.first_moment.get_or_insert_with(|| vec![0.0; n]);
        let v = self.second_moment.get_or_insert_with(|| vec![0.0; n]);
        for i in 0..n {
            let g = gradient[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            self.weights[i] -= eta * (m[i] / c1) / ((v[i] / c2).sqrt() + epsilon);
        }
        self.iteration += 1;
    }
}

pub(crate) fn check_momentum(momentum: f64) -> Result<(), OptimizerError> {
    if !(0.0..1.0).contains(&momentum) {
        return Err(OptimizerError::InvalidMomentum(momentum));
    }
    Ok(())
}
