use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::state::check_momentum;
use super::{OptimizerError, OptimizerState, Schedule};
use crate::problems::{GradientRng, Problem, ProblemError};

/// Update rule driven by [`run`]. Whether gradients are exact or sampled is
/// decided by the problem and the configured batch size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "GD")]
    Gd,
    #[serde(rename = "SGD")]
    Sgd,
    #[serde(rename = "LSGD")]
    Lsgd,
    #[serde(rename = "LSSGD")]
    Lssgd,
    #[serde(rename = "NAG")]
    Nag,
    #[serde(rename = "LS-NAG")]
    LsNag,
    #[serde(rename = "RMSProp")]
    RmsProp,
    #[serde(rename = "LS-RMSProp")]
    LsRmsProp,
    #[serde(rename = "Adam")]
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Descent,
    Nesterov,
    RmsProp,
    Adam,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Gd,
        Method::Sgd,
        Method::Lsgd,
        Method::Lssgd,
        Method::Nag,
        Method::LsNag,
        Method::RmsProp,
        Method::LsRmsProp,
        Method::Adam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gd => "GD",
            Method::Sgd => "SGD",
            Method::Lsgd => "LSGD",
            Method::Lssgd => "LSSGD",
            Method::Nag => "NAG",
            Method::LsNag => "LS-NAG",
            Method::RmsProp => "RMSProp",
            Method::LsRmsProp => "LS-RMSProp",
            Method::Adam => "Adam",
        }
    }

    pub fn is_smoothed(self) -> bool {
        matches!(
            self,
            Method::Lsgd | Method::Lssgd | Method::LsNag | Method::LsRmsProp
        )
    }

    /// The unsmoothed method with the same update rule.
    pub fn plain(self) -> Method {
        match self {
            Method::Lsgd => Method::Gd,
            Method::Lssgd => Method::Sgd,
            Method::LsNag => Method::Nag,
            Method::LsRmsProp => Method::RmsProp,
            m => m,
        }
    }

    fn rule(self) -> Rule {
        match self {
            Method::Gd | Method::Sgd | Method::Lsgd | Method::Lssgd => Rule::Descent,
            Method::Nag | Method::LsNag => Rule::Nesterov,
            Method::RmsProp | Method::LsRmsProp => Rule::RmsProp,
            Method::Adam => Rule::Adam,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

fn default_order() -> usize {
    1
}
fn default_momentum() -> f64 {
    0.9
}
fn default_rms_decay() -> f64 {
    0.99
}
fn default_epsilon() -> f64 {
    1e-8
}
fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_sigma() -> Schedule {
    Schedule::constant(0.0)
}

/// Everything [`run`] needs besides the problem and the starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    pub eta: Schedule,
    /// Used by smoothed methods only; plain methods always run with σ = 0.
    #[serde(default = "default_sigma")]
    pub sigma: Schedule,
    #[serde(default = "default_order")]
    pub order: usize,
    pub iterations: usize,
    #[serde(default)]
    pub seed: u64,
    /// Minibatch size for finite-sum problems; `None` uses the full dataset.
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default = "default_momentum")]
    pub momentum: f64,
    #[serde(default = "default_rms_decay")]
    pub rms_decay: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
}

impl RunConfig {
    pub fn new(method: Method, eta: Schedule, iterations: usize) -> Self {
        Self {
            method,
            eta,
            sigma: default_sigma(),
            order: default_order(),
            iterations,
            seed: 0,
            batch_size: None,
            momentum: default_momentum(),
            rms_decay: default_rms_decay(),
            epsilon: default_epsilon(),
            beta1: default_beta1(),
            beta2: default_beta2(),
        }
    }

    pub fn with_sigma(mut self, sigma: Schedule) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_batch(mut self, batch: usize) -> Self {
        self.batch_size = Some(batch);
        self
    }

    pub fn with_momentum(mut self, momentum: f64) -> Self {
        self.momentum = momentum;
        self
    }

    fn validate(&self) -> Result<(), OptimizerError> {
        self.eta.validate(false)?;
        self.sigma.validate(true)?;
        match self.method.rule() {
            Rule::Nesterov => check_momentum(self.momentum)?,
            Rule::RmsProp => {
                if !(self.rms_decay > 0.0 && self.rms_decay < 1.0) {
                    return Err(OptimizerError::InvalidDecay(self.rms_decay));
                }
            }
            Rule::Adam => {
                for b in [self.beta1, self.beta2] {
                    if !(b > 0.0 && b < 1.0) {
                        return Err(OptimizerError::InvalidDecay(b));
                    }
                }
            }
            Rule::Descent => {}
        }
        if !(self.epsilon > 0.0) {
            return Err(OptimizerError::InvalidEpsilon(self.epsilon));
        }
        Ok(())
    }
}

/// One recorded iteration. The gradient columns describe the (stochastic)
/// gradient drawn at iteration `iter`, before the update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub loss: f64,
    pub grad_norm: f64,
    pub smoothed_grad_norm: f64,
    pub dist_to_opt: Option<f64>,
    pub eta: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub method: Method,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
    /// A non-finite loss or gradient stopped the run early.
    pub diverged: bool,
    pub final_weights: Vec<f64>,
}

pub const TRACE_HEADER: &str = "iter,loss,grad_norm,smoothed_grad_norm,dist_to_opt,eta,sigma";

impl RunTrace {
    pub fn final_loss(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.loss)
    }

    pub fn final_dist(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.dist_to_opt)
    }

    pub fn losses(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.loss).collect()
    }

    /// CSV with the [`TRACE_HEADER`] columns; numbers use shortest
    /// round-trip formatting so output is byte-reproducible.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for r in &self.rows {
            let dist = r.dist_to_opt.map(|d| d.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.iter, r.loss, r.grad_norm, r.smoothed_grad_norm, dist, r.eta, r.sigma
            );
        }
        out
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Runs `config.iterations` updates from `w0`, recording rows for iterations
/// `0..=iterations`. Deterministic in `config.seed`.
///
/// A non-finite loss or gradient ends the run with `diverged = true` and the
/// trace up to that point.
pub fn run<P: Problem + ?Sized>(
    problem: &P,
    config: &RunConfig,
    w0: &[f64],
) -> Result<RunTrace, OptimizerError> {
    config.validate()?;
    problem.check_len(w0)?;
    let batch = match (problem.num_samples(), config.batch_size) {
        (Some(n), Some(b)) => {
            if b == 0 {
                return Err(ProblemError::ZeroBatch.into());
            }
            if b > n {
                return Err(ProblemError::BatchTooLarge {
                    batch: b,
                    samples: n,
                }
                .into());
            }
            b
        }
        (Some(n), None) => n,
        (None, b) => b.unwrap_or(1),
    };
    let sigma = if config.method.is_smoothed() {
        config.sigma.clone()
    } else {
        Schedule::constant(0.0)
    };
    let mut state = OptimizerState::new(w0.to_vec()).with_sigma_schedule(sigma, config.order)?;
    let mut rng = GradientRng::new(config.seed);
    let optimum = problem.known_minimizer();
    let mut rows = Vec::with_capacity(config.iterations + 1);
    let mut diverged = false;

    for k in 0..=config.iterations {
        state.sync_sigma()?;
        let eta = config.eta.value_at(k);
        let loss = problem.value(state.weights());
        let dist_to_opt = optimum.as_ref().map(|o| distance(state.weights(), o));
        let mut row = TraceRow {
            iter: k,
            loss,
            grad_norm: f64::NAN,
            smoothed_grad_norm: f64::NAN,
            dist_to_opt,
            eta,
            sigma: state.sigma(),
        };
        if !loss.is_finite() {
            rows.push(row);
            diverged = true;
            break;
        }
        let point = match config.method.rule() {
            Rule::Nesterov => state.lookahead(config.momentum),
            _ => state.weights().to_vec(),
        };
        let g = problem.stochastic_gradient(&point, &mut rng, batch)?;
        let smoothed = match config.method.rule() {
            Rule::Adam => state.smooth(&g).map(|_| g.clone()),
            _ => state.smooth(&g),
        };
        let smoothed = match smoothed {
            Ok(s) => s,
            Err(OptimizerError::NonFiniteGradient { .. }) => {
                rows.push(row);
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        };
        row.grad_norm = norm(&g);
        row.smoothed_grad_norm = norm(&smoothed);
        rows.push(row);
        if k == config.iterations {
            break;
        }
        match config.method.rule() {
            Rule::Descent => state.descend(&smoothed, eta),
            Rule::Nesterov => state.momentum_update(&smoothed, eta, config.momentum),
            Rule::RmsProp => state.rmsprop_update(&smoothed, eta, config.rms_decay, config.epsilon),
            Rule::Adam => state.adam_update(&g, eta, config.beta1, config.beta2, config.epsilon),
        }
    }

    Ok(RunTrace {
        method: config.method,
        seed: config.seed,
        rows,
        diverged,
        final_weights: state.into_weights(),
    })
}
