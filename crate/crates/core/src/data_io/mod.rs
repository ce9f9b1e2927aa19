//! Labeled datasets: IDX container I/O, subsampling, class filtering,
//! synthetic Gaussian blobs, and CSV export.

mod idx;

pub use idx::{
    load_idx, parse_idx_images, parse_idx_labels, write_idx, IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC,
};

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("wrong magic number: expected {expected}, found {found}")]
    WrongMagic { expected: u32, found: u32 },
    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("selection would be empty")]
    Empty,
    #[error("class {0} does not occur in the dataset")]
    UnknownClass(usize),
    #[error("{0}")]
    Invalid(String),
}

/// Row-major features in `[0, 1]` with integer labels in `0..num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: Vec<f64>,
    pub feature_dim: usize,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    /// Where the data came from, e.g. a file path or generator description.
    pub source: String,
    /// Seed of the last random operation applied, if any.
    pub seed: Option<u64>,
}

impl LabeledDataset {
    pub fn new(
        features: Vec<f64>,
        feature_dim: usize,
        labels: Vec<usize>,
        num_classes: usize,
        source: impl Into<String>,
    ) -> Result<Self, DataError> {
        if feature_dim == 0 || features.len() != labels.len() * feature_dim {
            return Err(DataError::Invalid(format!(
                "{} feature values do not form {} rows of width {}",
                features.len(),
                labels.len(),
                feature_dim
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(DataError::Invalid(format!(
                "label {l} outside 0..{num_classes}"
            )));
        }
        Ok(Self {
            features,
            feature_dim,
            labels,
            num_classes,
            source: source.into(),
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.feature_dim..(i + 1) * self.feature_dim]
    }

    fn select(&self, indices: &[usize]) -> (Vec<f64>, Vec<usize>) {
        let mut features = Vec::with_capacity(indices.len() * self.feature_dim);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        (features, indices.iter().map(|&i| self.labels[i]).collect())
    }

    /// `label,f0,f1,...` per row with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for j in 0..self.feature_dim {
            let _ = write!(out, ",f{j}");
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{}", self.labels[i]);
            for x in self.row(i) {
                let _ = write!(out, ",{x}");
            }
            out.push('\n');
        }
        out
    }
}

/// Uniform sample of `round(fraction·n)` rows without replacement, kept in
/// their original order.
pub fn subsample(
    dataset: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<LabeledDataset, DataError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(DataError::InvalidFraction(fraction));
    }
    let n = dataset.len();
    let size = (fraction * n as f64).round() as usize;
    if size == 0 {
        return Err(DataError::Empty);
    }
    let mut indices = if size == n {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::index::sample(&mut rng, n, size).into_vec()
    };
    indices.sort_unstable();
    let (features, labels) = dataset.select(&indices);
    Ok(LabeledDataset {
        features,
        labels,
        seed: Some(seed),
        source: format!("{} | subsample {fraction}", dataset.source),
        ..dataset.clone()
    })
}

/// Keeps the rows whose label is in `classes` and relabels them
/// `0..k` by ascending original class.
pub fn filter_classes(
    dataset: &LabeledDataset,
    classes: &[usize],
) -> Result<LabeledDataset, DataError> {
    let mut wanted = classes.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    if wanted.is_empty() {
        return Err(DataError::Empty);
    }
    for &c in &wanted {
        if !dataset.labels.contains(&c) {
            return Err(DataError::UnknownClass(c));
        }
    }
    let indices: Vec<usize> = (0..dataset.len())
        .filter(|&i| wanted.binary_search(&dataset.labels[i]).is_ok())
        .collect();
    let (features, labels) = dataset.select(&indices);
    let labels = labels
        .into_iter()
        .map(|l| wanted.binary_search(&l).expect("filtered above"))
        .collect();
    Ok(LabeledDataset {
        features,
        labels,
        num_classes: wanted.len(),
        source: format!("{} | classes {wanted:?}", dataset.source),
        ..dataset.clone()
    })
}

/// Balanced Gaussian clusters with standard deviation `spread`, then a single
/// global min-max rescale into `[0, 1]`.
///
/// Class `c` is centred at `√2·(cos θ, sin θ, cos θ, sin θ, …)` with
/// `θ = 2πc/K + π/4`; for two classes that is `±1` in every coordinate.
/// Rows cycle through the classes.
pub fn synthetic_blobs(
    num_classes: usize,
    per_class: usize,
    dim: usize,
    spread: f64,
    seed: u64,
) -> Result<LabeledDataset, DataError> {
    if per_class == 0 || num_classes == 0 || dim == 0 {
        return Err(DataError::Empty);
    }
    if !(spread >= 0.0) || !spread.is_finite() {
        return Err(DataError::Invalid(format!(
            "spread must be nonnegative, got {spread}"
        )));
    }
    let centers: Vec<Vec<f64>> = (0..num_classes)
        .map(|c| {
            let theta = 2.0 * PI * c as f64 / num_classes as f64 + PI / 4.0;
            let (s, co) = theta.sin_cos();
            (0..dim)
                .map(|j| 2f64.sqrt() * if j % 2 == 0 { co } else { s })
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = num_classes * per_class;
    let mut features = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % num_classes;
        for &mu in &centers[c] {
            let z: f64 = StandardNormal.sample(&mut rng);
            features.push(mu + spread * z);
        }
        labels.push(c);
    }
    let lo = features.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = features.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        features.iter_mut().for_each(|x| *x = (*x - lo) / (hi - lo));
    } else {
        features.iter_mut().for_each(|x| *x = 0.0);
    }
    let mut out = LabeledDataset::new(
        features,
        dim,
        labels,
        num_classes,
        format!("blobs(classes={num_classes}, per_class={per_class}, dim={dim}, spread={spread})"),
    )?;
    out.seed = Some(seed);
    Ok(out)
}
