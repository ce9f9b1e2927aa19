use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::TheoryError;

/// Largest matrix handled by the dense eigensolve.
pub const EIGEN_CHECK_MAX_DIM: usize = 64;

/// Outcome of the partial-sum majorization check over random SPD pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenProductReport {
    pub trials: usize,
    pub violations: usize,
    /// Smallest `Σ_{j≤k} λⱼ(A)λⱼ(B) − Σ_{j≤k} λⱼ(AB)` seen, relative to the right side.
    pub min_relative_slack: f64,
}

impl EigenProductReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn symmetric_eigenvalues(a: DMatrix<f64>) -> Vec<f64> {
    let sym = (&a + a.transpose()) * 0.5;
    sorted_desc(sym.symmetric_eigenvalues().iter().copied().collect())
}

/// For SPD `A, B` returns, for each `k`, the relative slack
/// `(Σ_{j≤k} λⱼ(A)λⱼ(B) − Σ_{j≤k} λⱼ(AB)) / Σ_{j≤k} λⱼ(A)λⱼ(B)`, eigenvalues
/// in decreasing order. `AB` is similar to `Lᵀ B L` with `A = L Lᵀ`, which is
/// symmetric, so its eigenvalues are real.
pub fn majorization_slack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>, TheoryError> {
    let dim = a.nrows();
    if dim == 0 {
        return Err(TheoryError::EmptyDimension);
    }
    if dim > EIGEN_CHECK_MAX_DIM {
        return Err(TheoryError::TooLarge(dim));
    }
    let chol = a
        .clone()
        .cholesky()
        .ok_or(TheoryError::NonPositiveVariance)?;
    let l = chol.l();
    let prod = symmetric_eigenvalues(l.transpose() * b * &l);
    let ea = symmetric_eigenvalues(a.clone());
    let eb = symmetric_eigenvalues(b.clone());
    if eb.last().is_some_and(|&x| x <= 0.0) {
        return Err(TheoryError::NonPositiveVariance);
    }
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    Ok((0..dim)
        .map(|k| {
            lhs += prod[k];
            rhs += ea[k] * eb[k];
            (rhs - lhs) / rhs
        })
        .collect())
}

fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
    let x = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    &x * x.transpose() / dim as f64 + DMatrix::identity(dim, dim) * 0.1
}

/// Checks `Σ_{j≤k} λⱼ(AB) ≤ Σ_{j≤k} λⱼ(A)λⱼ(B)` for every `k` on `trials`
/// random SPD pairs of each size. Violations beyond rounding (`1e-10`
/// relative) are counted.
pub fn eigen_product_check(
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<EigenProductReport, TheoryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for &dim in sizes {
        if dim > EIGEN_CHECK_MAX_DIM {
            return Err(TheoryError::TooLarge(dim));
        }
        for _ in 0..trials {
            let a = random_spd(&mut rng, dim);
            let b = random_spd(&mut rng, dim);
            for s in majorization_slack(&a, &b)? {
                min_slack = min_slack.min(s);
                if s < -1e-10 {
                    violations += 1;
                }
            }
        }
    }
    Ok(EigenProductReport {
        trials: trials * sizes.len(),
        violations,
        min_relative_slack: min_slack,
    })
}
