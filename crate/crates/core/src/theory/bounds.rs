use std::f64::consts::PI;

use super::{check_sigma, compute_beta, TheoryError};
use crate::smoothing::closed_form_spectrum;

/// Smallest admissible `α` for the concentration bound: `√β / (1 − π/√m)`.
pub fn ratio_tail_threshold(sigma: f64, m: usize) -> Result<f64, TheoryError> {
    if (m as f64) <= PI * PI {
        return Err(TheoryError::DimensionTooSmall(m));
    }
    let beta = compute_beta(sigma, m)?.beta_closed;
    Ok(beta.sqrt() / (1.0 - PI / (m as f64).sqrt()))
}

/// Upper bound on `P(‖M_σ v‖ ≥ α‖v‖)` for `v` uniform in the unit ball:
/// `2 exp(−(2/π²) m ((α − απ/√m − √β)/(α+1))²)`.
pub fn ratio_tail_bound(alpha: f64, sigma: f64, m: usize) -> Result<f64, TheoryError> {
    let threshold = ratio_tail_threshold(sigma, m)?;
    if !(alpha > threshold) {
        return Err(TheoryError::OutsideDomain { alpha, threshold });
    }
    let beta = compute_beta(sigma, m)?.beta_closed;
    let mf = m as f64;
    let gap = (alpha - alpha * PI / mf.sqrt() - beta.sqrt()) / (alpha + 1.0);
    Ok(2.0 * (-(2.0 / (PI * PI)) * mf * gap * gap).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceBound {
    pub n: usize,
    pub sigma: f64,
    pub m: usize,
    pub kappa: f64,
    /// `1 − 1/κ + (1/(κm)) Σ_{j=0}^{m−1} λⱼ⁻²`
    pub bound: f64,
}

/// Bound on the ratio of summed coordinate variances after/before smoothing
/// Gaussian noise whose covariance has condition number `κ`.
///
/// The sum runs over the `m` eigenvalues `j = 0..m−1`.
pub fn variance_ratio_bound(
    n: usize,
    sigma: f64,
    m: usize,
    kappa: f64,
) -> Result<VarianceBound, TheoryError> {
    check_sigma(sigma)?;
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(TheoryError::InvalidConditionNumber(kappa));
    }
    if n == 0 {
        return Err(crate::smoothing::SmoothingError::ZeroOrder.into());
    }
    if m == 0 {
        return Err(TheoryError::EmptyDimension);
    }
    // The closed-form spectrum is evaluated directly, so small m (below the
    // stencil width) still yields the periodic-difference eigenvalues.
    let mean_inv_sq = closed_form_spectrum(m, n, sigma)
        .iter()
        .map(|l| 1.0 / (l * l))
        .sum::<f64>()
        / m as f64;
    Ok(VarianceBound {
        n,
        sigma,
        m,
        kappa,
        bound: 1.0 - 1.0 / kappa + mean_inv_sq / kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_tail_regression_value() {
        // Independent 40-digit evaluation of the closed form at (0.8, σ=1, m=10⁴).
        let v = ratio_tail_bound(0.8, 1.0, 10_000).unwrap();
        assert!((v - 1.744_768_737_617_276e-3).abs() < 1e-15, "{v}");
    }

    #[test]
    fn ratio_tail_limits() {
        let t = ratio_tail_threshold(1.0, 10_000).unwrap();
        let near = ratio_tail_bound(t * (1.0 + 1e-9), 1.0, 10_000).unwrap();
        assert!((near - 2.0).abs() < 1e-6);
        let mut prev = 2.0;
        for &m in &[1_000usize, 10_000, 100_000, 1_000_000] {
            let b = ratio_tail_bound(0.8, 1.0, m).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(prev < 1e-100);
    }

    #[test]
    fn ratio_tail_domain_errors() {
        assert!(matches!(
            ratio_tail_bound(0.5, 1.0, 10_000),
            Err(TheoryError::OutsideDomain { .. })
        ));
        assert_eq!(
            ratio_tail_bound(0.9, 1.0, 9),
            Err(TheoryError::DimensionTooSmall(9))
        );
    }

    #[test]
    fn variance_bound_examples() {
        let b = variance_ratio_bound(1, 1.0, 10_000, 1.0).unwrap();
        assert!((b.bound - 0.268).abs() < 1e-3);
        assert!((variance_ratio_bound(2, 1.0, 10_000, 1.0).unwrap().bound - 0.279).abs() < 1e-3);
        assert!((variance_ratio_bound(3, 1.0, 10_000, 1.0).unwrap().bound - 0.290).abs() < 1e-3);
        // ½(1/1² + 1/5²)
        let b = variance_ratio_bound(1, 1.0, 2, 1.0).unwrap().bound;
        assert!((b - 0.52).abs() < 1e-15);
        assert!(variance_ratio_bound(0, 1.0, 10, 1.0).is_err());
    }

    #[test]
    fn variance_bound_properties() {
        for n in 1..=3 {
            let mut prev = 1.0 + 1e-12;
            for k in 0..=10 {
                let s = k as f64 * 0.5;
                let b = variance_ratio_bound(n, s, 101, 1.0).unwrap().bound;
                assert!(b <= 1.0 + 1e-15);
                if k > 0 {
                    assert!(b < prev);
                }
                prev = b;
            }
        }
        let b1 = variance_ratio_bound(1, 2.0, 50, 1.0).unwrap().bound;
        let b4 = variance_ratio_bound(1, 2.0, 50, 4.0).unwrap().bound;
        assert!(b4 > b1 && b4 <= 1.0);
        assert_eq!(
            variance_ratio_bound(1, 1.0, 10, 0.5),
            Err(TheoryError::InvalidConditionNumber(0.5))
        );
    }
}
