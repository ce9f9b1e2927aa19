//! Dense reference solver for `Aⁿ_σ d = g`, used to check the spectral path.

use super::{SmoothingError, Stencil};

/// Dense cost guard for [`dense_solve_oracle`].
pub const DENSE_ORACLE_MAX_DIM: usize = 4096;

/// LU factorization with partial pivoting of a row-major square matrix.
#[derive(Debug, Clone)]
pub struct DenseLu {
    dim: usize,
    lu: Vec<f64>,
    pivots: Vec<usize>,
}

impl DenseLu {
    pub fn factor(dim: usize, mut a: Vec<f64>) -> Result<Self, SmoothingError> {
        assert_eq!(a.len(), dim * dim);
        let mut pivots = Vec::with_capacity(dim);
        for k in 0..dim {
            let (p, best) = (k..dim)
                .map(|i| (i, a[i * dim + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                return Err(SmoothingError::SingularMatrix(k));
            }
            if p != k {
                for j in 0..dim {
                    a.swap(k * dim + j, p * dim + j);
                }
            }
            pivots.push(p);
            let pivot = a[k * dim + k];
            let (upper, lower) = a.split_at_mut((k + 1) * dim);
            let row_k = &upper[k * dim..];
            for row in lower.chunks_exact_mut(dim) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor != 0.0 {
                    for (x, &u) in row[k + 1..].iter_mut().zip(&row_k[k + 1..]) {
                        *x -= factor * u;
                    }
                }
            }
        }
        Ok(Self { dim, lu: a, pivots })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut x = b.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            x.swap(k, p);
        }
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

/// Row-major dense `Aⁿ_σ = I + (−1)ⁿσLⁿ` of size `m ≥ 2n+1`, built from the
/// wrapped stencil.
pub(crate) fn dense_operator(m: usize, n: usize, sigma: f64) -> Result<Vec<f64>, SmoothingError> {
    let stencil = Stencil::new(n)?;
    let v = stencil.wrapped(m)?;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            // (v * d)_i = Σ_k v_k d_{i-k}; the coefficient of d_j is v_{i-j}.
            let coeff = v[(i + m - j) % m];
            a[i * m + j] = sign * sigma * coeff + if i == j { 1.0 } else { 0.0 };
        }
    }
    Ok(a)
}

/// Solves `Aⁿ_σ d = g` by dense LU. Dimensions below `2n+1` are zero-padded to
/// `2n+1` and the solution truncated, mirroring [`super::Padding::ZeroPad`].
pub fn dense_solve_oracle(
    m: usize,
    n: usize,
    sigma: f64,
    g: &[f64],
) -> Result<Vec<f64>, SmoothingError> {
    if m > DENSE_ORACLE_MAX_DIM {
        return Err(SmoothingError::OracleTooLarge {
            dim: m,
            limit: DENSE_ORACLE_MAX_DIM,
        });
    }
    if g.len() != m {
        return Err(SmoothingError::LengthMismatch {
            expected: m,
            found: g.len(),
        });
    }
    if sigma == 0.0 {
        return Ok(g.to_vec());
    }
    let work = m.max(2 * n + 1);
    let a = dense_operator(work, n, sigma)?;
    let mut rhs = g.to_vec();
    rhs.resize(work, 0.0);
    let mut d = DenseLu::factor(work, a)?.solve(&rhs);
    d.truncate(m);
    Ok(d)
}
