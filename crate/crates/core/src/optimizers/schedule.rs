use serde::{Deserialize, Serialize};

use super::OptimizerError;

/// How a scheduled quantity evolves with the iteration counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    /// Divide by `factor` after every `period` iterations.
    StepDecay {
        period: usize,
        factor: f64,
    },
    /// Switch to `value` from iteration `start` on; `initial` applies before the first stage.
    StageWise {
        stages: Vec<(usize, f64)>,
    },
}

/// Piecewise-constant, non-increasing schedule (step size η or smoothing σ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub initial: f64,
    #[serde(flatten)]
    pub kind: ScheduleKind,
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Self {
            initial: value,
            kind: ScheduleKind::Constant,
        }
    }

    pub fn step_decay(initial: f64, period: usize, factor: f64) -> Self {
        Self {
            initial,
            kind: ScheduleKind::StepDecay { period, factor },
        }
    }

    pub fn stage_wise(initial: f64, stages: Vec<(usize, f64)>) -> Self {
        Self {
            initial,
            kind: ScheduleKind::StageWise { stages },
        }
    }

    pub fn value_at(&self, k: usize) -> f64 {
        match &self.kind {
            ScheduleKind::Constant => self.initial,
            ScheduleKind::StepDecay { period, factor } => {
                let drops = (k / period) as i32;
                self.initial / factor.powi(drops)
            }
            ScheduleKind::StageWise { stages } => stages
                .iter()
                .take_while(|(start, _)| *start <= k)
                .last()
                .map_or(self.initial, |&(_, v)| v),
        }
    }

    /// Checks the schedule is non-increasing and stays positive (or
    /// nonnegative when `allow_zero`, as for σ).
    pub fn validate(&self, allow_zero: bool) -> Result<(), OptimizerError> {
        let ok = |v: f64| v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
        if !ok(self.initial) {
            return Err(OptimizerError::InvalidSchedule(format!(
                "initial value {} out of range",
                self.initial
            )));
        }
        match &self.kind {
            ScheduleKind::Constant => Ok(()),
            ScheduleKind::StepDecay { period, factor } => {
                if *period == 0 || !(*factor > 1.0) || !factor.is_finite() {
                    return Err(OptimizerError::InvalidSchedule(format!(
                        "step decay needs period > 0 and factor > 1, got {period} and {factor}"
                    )));
                }
                Ok(())
            }
            ScheduleKind::StageWise { stages } => {
                let mut prev = (0usize, self.initial);
                for (i, &(start, value)) in stages.iter().enumerate() {
                    if !ok(value) || value > prev.1 || (i > 0 && start <= prev.0) {
                        return Err(OptimizerError::InvalidSchedule(format!(
                            "stage {i} at iteration {start} with value {value} breaks the \
                             increasing-start, non-increasing-value order"
                        )));
                    }
                    prev = (start, value);
                }
                Ok(())
            }
        }
    }
}

/// σ in effect at iteration `k`.
pub fn sigma_schedule_step(schedule: &Schedule, k: usize) -> f64 {
    schedule.value_at(k)
}
