use super::{Problem, ProblemError};
use crate::smoothing::SmootherPlan;

/// Parameters of one envelope evaluation `u(w, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeQuery {
    pub t: f64,
    pub sigma: f64,
    /// Stop once `‖∇_v z‖` falls to this level.
    pub inner_tolerance: f64,
    pub inner_max_iterations: usize,
}

impl EnvelopeQuery {
    pub fn new(t: f64, sigma: f64) -> Self {
        Self {
            t,
            sigma,
            inner_tolerance: 1e-10,
            inner_max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    /// `u(w, t) = min_v f(v) + (1/2t)⟨v − w, A_σ(v − w)⟩`
    pub value: f64,
    /// `∇_w u = −(1/t) A_σ (v* − w)`
    pub gradient: Vec<f64>,
    pub argmin: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn add(w: &[f64], delta: &[f64]) -> Vec<f64> {
    w.iter().zip(delta).map(|(a, b)| a + b).collect()
}

/// Inner objective and its gradient in terms of the offset `δ = v − w`,
/// which keeps `(1/t)A_σδ` free of cancellation when `t` is tiny.
struct Inner<'a, P: ?Sized> {
    problem: &'a P,
    plan: SmootherPlan,
    w: &'a [f64],
    t: f64,
}

impl<P: Problem + ?Sized> Inner<'_, P> {
    fn value(&self, delta: &[f64], a_delta: &[f64]) -> f64 {
        self.problem.value(&add(self.w, delta)) + dot(delta, a_delta) / (2.0 * self.t)
    }

    fn gradient(&self, delta: &[f64], a_delta: &[f64]) -> Vec<f64> {
        let g = self.problem.gradient(&add(self.w, delta));
        g.iter().zip(a_delta).map(|(a, b)| a + b / self.t).collect()
    }
}

/// Evaluates the envelope starting the inner solve at `v = w`.
pub fn hopf_lax_envelope<P: Problem + ?Sized>(
    problem: &P,
    w: &[f64],
    query: &EnvelopeQuery,
) -> Result<EnvelopeResult, ProblemError> {
    hopf_lax_envelope_from(problem, w, query, w)
}

/// Evaluates the envelope with the inner solve warm-started at `start`.
///
/// The inner problem is minimized by gradient descent preconditioned with
/// `t·A_σ⁻¹` (exact for the coupling term) and Armijo backtracking.
pub fn hopf_lax_envelope_from<P: Problem + ?Sized>(
    problem: &P,
    w: &[f64],
    query: &EnvelopeQuery,
    start: &[f64],
) -> Result<EnvelopeResult, ProblemError> {
    problem.check_len(w)?;
    problem.check_len(start)?;
    if !(query.t > 0.0) || !query.t.is_finite() {
        return Err(ProblemError::InvalidTime(query.t));
    }
    let inner = Inner {
        problem,
        plan: SmootherPlan::new(w.len(), 1, query.sigma)?,
        w,
        t: query.t,
    };
    let mut delta: Vec<f64> = start.iter().zip(w).map(|(s, x)| s - x).collect();
    let mut a_delta = inner.plan.apply_forward(&delta)?;
    let mut z = inner.value(&delta, &a_delta);
    let mut grad = inner.gradient(&delta, &a_delta);
    let mut residual = dot(&grad, &grad).sqrt();
    let mut iterations = 0;

    while residual > query.inner_tolerance {
        if iterations == query.inner_max_iterations {
            return Err(ProblemError::NonConvergence {
                iterations,
                residual,
                best: add(w, &delta),
            });
        }
        let precond = inner.plan.apply_inverse(&grad)?;
        let slope = -query.t * dot(&grad, &precond);
        let mut step = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = delta
                .iter()
                .zip(&precond)
                .map(|(d, p)| d - step * query.t * p)
                .collect();
            let a_trial = inner.plan.apply_forward(&trial)?;
            let z_trial = inner.value(&trial, &a_trial);
            // Once z changes at rounding level, decrease of ‖∇z‖ decides instead.
            let noise = 16.0 * f64::EPSILON * (z.abs() + 1.0);
            if (z_trial - z).abs() <= noise {
                let g_trial = inner.gradient(&trial, &a_trial);
                if dot(&g_trial, &g_trial).sqrt() < residual {
                    break Some((trial, a_trial, z_trial));
                }
            } else if z_trial <= z + 1e-4 * step * slope {
                break Some((trial, a_trial, z_trial));
            }
            step *= 0.5;
            if step < 1e-20 {
                break None;
            }
        };
        let Some((trial, a_trial, z_trial)) = accepted else {
            return Err(ProblemError::NonConvergence {
                iterations,
                residual,
                best: add(w, &delta),
            });
        };
        delta = trial;
        a_delta = a_trial;
        z = z_trial;
        grad = inner.gradient(&delta, &a_delta);
        residual = dot(&grad, &grad).sqrt();
        iterations += 1;
    }

    Ok(EnvelopeResult {
        value: z,
        gradient: a_delta.iter().map(|x| -x / query.t).collect(),
        argmin: add(w, &delta),
        iterations,
        residual,
    })
}

/// Proximal point `w⁺ = argmin_v f(v) + (1/2t)⟨v − w, A_σ(v − w)⟩`, which
/// satisfies `w⁺ = w − t A_σ⁻¹ ∇f(w⁺)`.
pub fn implicit_ls_step<P: Problem + ?Sized>(
    problem: &P,
    w: &[f64],
    t: f64,
    sigma: f64,
) -> Result<Vec<f64>, ProblemError> {
    Ok(hopf_lax_envelope(problem, w, &EnvelopeQuery::new(t, sigma))?.argmin)
}
