use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{write_file, HarnessError};
use crate::data_io::synthetic_blobs;
use crate::optimizers::{run, Method, RunConfig, RunTrace, Schedule};
use crate::problems::{
    DiagonalQuadratic, DrilledHoles, FindCenter, GaussianNoise, NormSin, Problem, Rosenbrock,
    SoftmaxRegression,
};

fn default_sigma() -> Schedule {
    Schedule::constant(0.0)
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
fn default_noise() -> Vec<f64> {
    vec![0.0]
}
fn default_init_scale() -> f64 {
    3.0
}
fn default_success_radius() -> f64 {
    0.5
}
fn default_radius() -> f64 {
    1.0
}
fn default_narrowness() -> f64 {
    1.0 / 500f64.sqrt()
}

/// Objective of an experiment. List-valued fields (`noise_levels`, `dims`)
/// expand into one sub-experiment per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// 100-dimensional ill-conditioned quadratic with additive gradient noise,
    /// started from all ones.
    Quadratic {
        #[serde(default = "default_noise")]
        noise_levels: Vec<f64>,
    },
    /// Mean squared distance to standard normal points; the start is a
    /// Gaussian draw with standard deviation `init_scale`, shared by all runs.
    FindCenter {
        num_points: usize,
        dim: usize,
        data_seed: u64,
        #[serde(default = "default_init_scale")]
        init_scale: f64,
    },
    /// Chained Rosenbrock started from `(−3, −4, −3, −4, …)`.
    Rosenbrock { dims: Vec<usize> },
    /// Convex well with drilled holes; each seed starts uniformly within
    /// `delta` of hole `seed mod 13`.
    DrilledHoles {
        delta: f64,
        #[serde(default = "default_success_radius")]
        success_radius: f64,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_narrowness")]
        narrowness: f64,
    },
    /// Softmax regression on synthetic blobs, zero initial weights.
    SoftmaxBlobs {
        classes: usize,
        per_class: usize,
        dim: usize,
        spread: f64,
        data_seed: u64,
        #[serde(default)]
        l2_penalty: f64,
    },
    /// Radial test function started at `w = init_radius·e₁`.
    NormSin { dim: usize, init_radius: f64 },
}

/// One optimizer line-up entry; `label` names its output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub method: Method,
    pub eta: Schedule,
    #[serde(default = "default_sigma")]
    pub sigma: Schedule,
    #[serde(default = "default_order")]
    pub order: usize,
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

impl MethodSpec {
    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.method.name().to_string())
    }

    fn run_config(&self, iterations: usize, seed: u64) -> RunConfig {
        RunConfig {
            method: self.method,
            eta: self.eta.clone(),
            sigma: self.sigma.clone(),
            order: self.order,
            iterations,
            seed,
            batch_size: self.batch_size,
            momentum: self.momentum,
            rms_decay: self.rms_decay,
            epsilon: self.epsilon,
            beta1: self.beta1,
            beta2: self.beta2,
        }
    }
}

/// A reproducible experiment: every (variant, method, seed) cell is one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub description: String,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output_dir: Option<String>,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub methods: Vec<MethodSpec>,
}

impl ExperimentConfig {
    /// Parses and validates; parse errors carry the line and column.
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.experiment.is_empty()
            || !self
                .experiment
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return bad(format!(
                "experiment id {:?} must be nonempty ASCII letters, digits, '_' or '-'",
                self.experiment
            ));
        }
        if self.methods.is_empty() {
            return bad("method list is empty".into());
        }
        if self.seeds.is_empty() {
            return bad("seed list is empty".into());
        }
        let mut labels: Vec<String> = self.methods.iter().map(MethodSpec::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("method labels must be unique; set `label` to tell them apart".into());
        }
        match &self.problem {
            ProblemSpec::Quadratic { noise_levels } if noise_levels.is_empty() => {
                bad("noise_levels is empty".into())
            }
            ProblemSpec::Rosenbrock { dims } if dims.is_empty() => bad("dims is empty".into()),
            _ => Ok(()),
        }
    }
}

/// Start of a drilled-holes run: hole `seed mod count`, offset uniform in
/// the ball of radius `delta`.
pub fn drilled_start(problem: &DrilledHoles, seed: u64, delta: f64) -> (usize, Vec<f64>) {
    let holes = problem.hole_centers();
    let index = (seed % holes.len() as u64) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(7);
    let mut dir: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
    let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = delta * rng.random::<f64>().cbrt();
    dir.iter_mut().for_each(|x| *x *= r / n);
    let c = holes[index];
    (index, (0..3).map(|i| c[i] + dir[i]).collect())
}

struct Variant {
    id: String,
    problem: Box<dyn Problem>,
    start: Box<dyn Fn(u64) -> Vec<f64> + Send + Sync>,
    /// `(start center, target)` for basin-of-attraction bookkeeping.
    basins: Option<(DrilledHoles, f64, f64)>,
}

fn variants(cfg: &ExperimentConfig) -> Result<Vec<Variant>, HarnessError> {
    let id = &cfg.experiment;
    Ok(match &cfg.problem {
        ProblemSpec::Quadratic { noise_levels } => noise_levels
            .iter()
            .map(|&eps| Variant {
                id: format!("{id}-eps{eps}"),
                problem: Box::new(GaussianNoise::new(
                    DiagonalQuadratic::ill_conditioned_100(),
                    eps,
                )),
                start: Box::new(|_| vec![1.0; 100]),
                basins: None,
            })
            .collect(),
        ProblemSpec::FindCenter {
            num_points,
            dim,
            data_seed,
            init_scale,
        } => {
            let p = FindCenter::random(*num_points, *dim, *data_seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*data_seed);
            rng.set_stream(1);
            let x0: Vec<f64> = (0..*dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    init_scale * z
                })
                .collect();
            vec![Variant {
                id: id.clone(),
                problem: Box::new(p),
                start: Box::new(move |_| x0.clone()),
                basins: None,
            }]
        }
        ProblemSpec::Rosenbrock { dims } => dims
            .iter()
            .map(|&d| {
                Ok(Variant {
                    id: format!("{id}-d{d}"),
                    problem: Box::new(Rosenbrock::new(d)?),
                    start: Box::new(move |_| {
                        (0..d)
                            .map(|i| if i % 2 == 0 { -3.0 } else { -4.0 })
                            .collect()
                    }),
                    basins: None,
                })
            })
            .collect::<Result<_, HarnessError>>()?,
        ProblemSpec::DrilledHoles {
            delta,
            success_radius,
            radius,
            narrowness,
        } => {
            let p = DrilledHoles::new(*radius, *narrowness);
            let q = p.clone();
            let delta = *delta;
            vec![Variant {
                id: id.clone(),
                problem: Box::new(p.clone()),
                start: Box::new(move |seed| drilled_start(&q, seed, delta).1),
                basins: Some((p, delta, *success_radius)),
            }]
        }
        ProblemSpec::SoftmaxBlobs {
            classes,
            per_class,
            dim,
            spread,
            data_seed,
            l2_penalty,
        } => {
            let d = synthetic_blobs(*classes, *per_class, *dim, *spread, *data_seed)?;
            let p =
                SoftmaxRegression::new(d.features, d.feature_dim, d.labels, *classes, *l2_penalty)?;
            let n = p.dim();
            vec![Variant {
                id: id.clone(),
                problem: Box::new(p),
                start: Box::new(move |_| vec![0.0; n]),
                basins: None,
            }]
        }
        ProblemSpec::NormSin { dim, init_radius } => {
            let (d, r) = (*dim, *init_radius);
            vec![Variant {
                id: id.clone(),
                problem: Box::new(NormSin::new(d)?),
                start: Box::new(move |_| {
                    let mut w = vec![0.0; d];
                    w[0] = r;
                    w
                }),
                basins: None,
            }]
        }
    })
}

/// One finished (variant, method, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    /// Experiment id, suffixed with the variant when the problem expands.
    pub experiment: String,
    pub label: String,
    pub method: Method,
    pub seed: u64,
    pub trace: RunTrace,
    /// `F(w_T) − F(w*)` when the minimizer is known.
    pub final_gap: Option<f64>,
    /// Drilled holes: ended within the success radius of the starting hole.
    pub near_start: Option<bool>,
    /// Drilled holes: ended within the success radius of the well center.
    pub near_target: Option<bool>,
}

impl CellResult {
    pub fn file_name(&self) -> String {
        let safe: String = self
            .label
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        format!("{}_{}_{}.csv", self.experiment, safe, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub cells: Vec<CellResult>,
    pub summary_csv: String,
}

impl ExperimentOutcome {
    /// Cells of one variant and label, in seed order.
    pub fn select(&self, experiment: &str, label: &str) -> Vec<&CellResult> {
        self.cells
            .iter()
            .filter(|c| c.experiment == experiment && c.label == label)
            .collect()
    }

    /// Seed-averaged final gap (or final loss when no minimizer is known).
    pub fn mean_final_gap(&self, experiment: &str, label: &str) -> f64 {
        let cells = self.select(experiment, label);
        cells
            .iter()
            .map(|c| c.final_gap.unwrap_or_else(|| c.trace.final_loss()))
            .sum::<f64>()
            / cells.len() as f64
    }
}

pub const SUMMARY_HEADER: &str =
    "experiment,label,method,seed,iterations_run,final_loss,final_gap,final_dist,diverged,near_start,near_target";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary(cells: &[CellResult]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.experiment,
            c.label,
            c.method,
            c.seed,
            c.trace.rows.last().map_or(0, |r| r.iter),
            c.trace.final_loss(),
            opt(c.final_gap),
            opt(c.trace.final_dist()),
            c.trace.diverged,
            opt(c.near_start),
            opt(c.near_target),
        );
    }
    out
}

/// Runs every cell (in parallel; results are independent of scheduling) and,
/// when `out_dir` is given, writes one trace CSV per cell plus
/// `{experiment}_summary.csv`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
) -> Result<ExperimentOutcome, HarnessError> {
    cfg.validate()?;
    let variants = variants(cfg)?;
    let mut jobs = Vec::new();
    for (vi, _) in variants.iter().enumerate() {
        for (mi, _) in cfg.methods.iter().enumerate() {
            for &seed in &cfg.seeds {
                jobs.push((vi, mi, seed));
            }
        }
    }
    let cells = jobs
        .par_iter()
        .map(|&(vi, mi, seed)| {
            let v = &variants[vi];
            let entry = &cfg.methods[mi];
            let w0 = (v.start)(seed);
            let trace = run(&v.problem, &entry.run_config(cfg.iterations, seed), &w0)?;
            let final_gap = v
                .problem
                .known_minimizer()
                .map(|w| trace.final_loss() - v.problem.value(&w));
            let (near_start, near_target) = match &v.basins {
                Some((holes, delta, radius)) => {
                    let (index, _) = drilled_start(holes, seed, *delta);
                    let start = holes.hole_centers()[index];
                    let dist = |c: [f64; 3]| {
                        (0..3)
                            .map(|i| (trace.final_weights[i] - c[i]).powi(2))
                            .sum::<f64>()
                            .sqrt()
                    };
                    let ok = !trace.diverged;
                    (
                        Some(ok && dist(start) < *radius),
                        Some(ok && dist([PI, PI, PI]) < *radius),
                    )
                }
                None => (None, None),
            };
            Ok(CellResult {
                experiment: v.id.clone(),
                label: entry.label(),
                method: entry.method,
                seed,
                trace,
                final_gap,
                near_start,
                near_target,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let summary_csv = summary(&cells);
    if let Some(dir) = out_dir {
        for c in &cells {
            write_file(&dir.join(c.file_name()), &c.trace.to_csv())?;
        }
        write_file(
            &dir.join(format!("{}_summary.csv", cfg.experiment)),
            &summary_csv,
        )?;
    }
    Ok(ExperimentOutcome { cells, summary_csv })
}
