use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::fft::FftPair;
use super::{SmoothingError, Stencil};

/// What to do when the dimension is smaller than the stencil width `2n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Append zeros up to `2n+1`, smooth, truncate (dummy variables).
    #[default]
    ZeroPad,
    /// Refuse to build the plan.
    Reject,
}

/// Dense operators acting on the logical `m < 2n+1` coordinates of a padded plan.
#[derive(Debug, Clone)]
struct PaddedOperators {
    /// `(Pᵀ A⁻¹ P)⁻¹`: the forward operator after minimizing out the dummy block.
    forward: DMatrix<f64>,
    /// `(Pᵀ A⁻¹ P)^{1/2}`
    inverse_sqrt: DMatrix<f64>,
}

/// Precomputed spectrum and transforms of `Aⁿ_σ = I + (−1)ⁿσLⁿ` for fixed `(m, n, σ)`.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone)]
pub struct SmootherPlan {
    dim: usize,
    work_dim: usize,
    order: usize,
    sigma: f64,
    stencil: Stencil,
    eigenvalues: Vec<f64>,
    inv_eigenvalues: Vec<f64>,
    fft: Option<FftPair>,
    padded: Option<PaddedOperators>,
}

/// Closed-form spectrum `λⱼ = 1 + 4ⁿσ sin²ⁿ(πj/m)`.
pub(crate) fn closed_form_spectrum(m: usize, n: usize, sigma: f64) -> Vec<f64> {
    let scale = 4f64.powi(n as i32) * sigma;
    (0..m)
        .map(|j| {
            let s = (PI * j as f64 / m as f64).sin();
            1.0 + scale * s.powi(2 * n as i32)
        })
        .collect()
}

impl SmootherPlan {
    /// Plan with zero padding for dimensions below the stencil width.
    pub fn new(dim: usize, order: usize, sigma: f64) -> Result<Self, SmoothingError> {
        Self::with_padding(dim, order, sigma, Padding::ZeroPad)
    }

    pub fn with_padding(
        dim: usize,
        order: usize,
        sigma: f64,
        padding: Padding,
    ) -> Result<Self, SmoothingError> {
        if dim == 0 {
            return Err(SmoothingError::EmptyDimension);
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(SmoothingError::InvalidSigma(sigma));
        }
        let stencil = Stencil::new(order)?;
        let width = stencil.width();
        let work_dim = if dim < width {
            match padding {
                Padding::ZeroPad => width,
                Padding::Reject => {
                    return Err(SmoothingError::DimensionTooSmall {
                        dim,
                        required: width,
                    })
                }
            }
        } else {
            dim
        };

        let eigenvalues = closed_form_spectrum(work_dim, order, sigma);
        let inv_eigenvalues = eigenvalues.iter().map(|l| 1.0 / l).collect();
        let fft = (sigma != 0.0).then(|| FftPair::new(work_dim));
        let mut plan = Self {
            dim,
            work_dim,
            order,
            sigma,
            stencil,
            eigenvalues,
            inv_eigenvalues,
            fft,
            padded: None,
        };
        plan.check_spectrum()?;
        if work_dim != dim && sigma != 0.0 {
            plan.padded = Some(plan.build_padded_operators());
        }
        Ok(plan)
    }

    /// Recomputes the spectrum as `1 + (−1)ⁿσ·DFT(vₙ)` from the wrapped stencil
    /// and compares against the closed form.
    fn check_spectrum(&self) -> Result<(), SmoothingError> {
        let Some(fft) = &self.fft else {
            return Ok(());
        };
        let v = self.stencil.wrapped(self.work_dim)?;
        let sign = if self.order.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let dft = fft.forward_real(&v);
        for (j, (z, &closed)) in dft.iter().zip(&self.eigenvalues).enumerate() {
            let transformed = 1.0 + sign * self.sigma * z.re;
            let tol = 1e-12 * closed;
            if (transformed - closed).abs() > tol || (self.sigma * z.im).abs() > tol {
                return Err(SmoothingError::SpectrumMismatch {
                    index: j,
                    closed,
                    transformed,
                });
            }
        }
        Ok(())
    }

    fn build_padded_operators(&self) -> PaddedOperators {
        let m = self.dim;
        let mut s = DMatrix::zeros(m, m);
        for k in 0..m {
            let mut e = vec![0.0; m];
            e[k] = 1.0;
            let col = self.padded_inverse(&e);
            for i in 0..m {
                s[(i, k)] = col[i];
            }
        }
        // symmetrize away rounding before the dense factorizations
        let s = (&s + s.transpose()) * 0.5;
        let eig = SymmetricEigen::new(s);
        let q = &eig.eigenvectors;
        let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x));
        PaddedOperators {
            forward: q * inv * q.transpose(),
            inverse_sqrt: q * sqrt * q.transpose(),
        }
    }

    fn padded_inverse(&self, g: &[f64]) -> Vec<f64> {
        let mut buf = g.to_vec();
        buf.resize(self.work_dim, 0.0);
        let fft = self.fft.as_ref().expect("padded operators need sigma > 0");
        let mut d = fft.filter_real(&buf, &self.inv_eigenvalues);
        d.truncate(self.dim);
        d
    }

    /// Logical dimension `m` (the length of vectors this plan accepts).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Transform length: `m`, or `2n+1` when padded.
    pub fn work_dim(&self) -> usize {
        self.work_dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    /// Spectrum of the (possibly padded) circulant, length [`Self::work_dim`].
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn is_padded(&self) -> bool {
        self.work_dim != self.dim
    }

    /// `σ = 0`: every operator is the identity and returns its input bit-for-bit.
    pub fn is_identity(&self) -> bool {
        self.sigma == 0.0
    }

    fn check_len(&self, x: &[f64]) -> Result<(), SmoothingError> {
        if x.len() != self.dim {
            return Err(SmoothingError::LengthMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `g = Aⁿ_σ d`, computed spectrally.
    pub fn apply_forward(&self, d: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        self.check_len(d)?;
        if self.is_identity() {
            return Ok(d.to_vec());
        }
        if let Some(p) = &self.padded {
            return Ok(dense_apply(&p.forward, d));
        }
        let fft = self.fft.as_ref().expect("fft present when sigma > 0");
        Ok(fft.filter_real(d, &self.eigenvalues))
    }

    /// `g = d + (−1)ⁿσ·(vₙ ∗ d)` by direct circular convolution, `O(m·n)`.
    ///
    /// Only defined without padding; padded plans fall back to [`Self::apply_forward`].
    pub fn apply_forward_stencil(&self, d: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        self.check_len(d)?;
        if self.is_padded() {
            return self.apply_forward(d);
        }
        let m = self.dim;
        let n = self.order;
        let c = self.stencil.coeffs();
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok((0..m)
            .map(|i| {
                let conv: f64 = (0..c.len()).map(|k| c[k] * d[(i + m + k - n) % m]).sum();
                d[i] + sign * self.sigma * conv
            })
            .collect())
    }

    /// `d = (Aⁿ_σ)⁻¹ g` via `ifft(fft(g) / λ)`.
    pub fn apply_inverse(&self, g: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        self.check_len(g)?;
        if self.is_identity() {
            return Ok(g.to_vec());
        }
        if self.is_padded() {
            return Ok(self.padded_inverse(g));
        }
        let fft = self.fft.as_ref().expect("fft present when sigma > 0");
        Ok(fft.filter_real(g, &self.inv_eigenvalues))
    }

    /// `M_σ v = A_σ^{-1/2} v` with spectral multipliers `λⱼ^{-1/2}`; order 1 only.
    pub fn apply_inverse_sqrt(&self, v: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        if self.order != 1 {
            return Err(SmoothingError::UnsupportedOrder(self.order));
        }
        self.check_len(v)?;
        if self.is_identity() {
            return Ok(v.to_vec());
        }
        if let Some(p) = &self.padded {
            return Ok(dense_apply(&p.inverse_sqrt, v));
        }
        let mult: Vec<f64> = self.inv_eigenvalues.iter().map(|x| x.sqrt()).collect();
        let fft = self.fft.as_ref().expect("fft present when sigma > 0");
        Ok(fft.filter_real(v, &mult))
    }

    /// `⟨x, Aⁿ_σ x⟩`, the squared `H_σ` norm.
    pub fn energy_norm_sq(&self, x: &[f64]) -> Result<f64, SmoothingError> {
        let ax = self.apply_forward(x)?;
        Ok(ax.iter().zip(x).map(|(a, b)| a * b).sum())
    }
}

fn dense_apply(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(x))
        .iter()
        .copied()
        .collect()
}
