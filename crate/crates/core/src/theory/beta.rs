use std::f64::consts::PI;

use super::{check_sigma, TheoryError};

/// `β = (1/m) Σⱼ 1/(1 + 4σ sin²(πj/m))`, the mean eigenvalue of `A_σ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaResult {
    pub sigma: f64,
    pub m: usize,
    /// `(1+αᵐ) / ((1−αᵐ)√(4σ+1))`
    pub beta_closed: f64,
    /// Direct average over the `m` roots of unity.
    pub beta_sum: f64,
    /// Root `(2σ+1−√(4σ+1))/(2σ)` of `−σz² + (2σ+1)z − σ` inside the unit disc.
    pub alpha: f64,
    /// `1/√(1+4σ)`, the `m → ∞` limit.
    pub beta_limit: f64,
}

pub fn compute_beta(sigma: f64, m: usize) -> Result<BetaResult, TheoryError> {
    check_sigma(sigma)?;
    if m == 0 {
        return Err(TheoryError::EmptyDimension);
    }
    if sigma == 0.0 {
        return Ok(BetaResult {
            sigma,
            m,
            beta_closed: 1.0,
            beta_sum: 1.0,
            alpha: 0.0,
            beta_limit: 1.0,
        });
    }
    let root = (4.0 * sigma + 1.0).sqrt();
    // Rationalized form of (2σ+1−√(4σ+1))/(2σ); no cancellation for small σ.
    let alpha = 2.0 * sigma / (2.0 * sigma + 1.0 + root);
    let am = alpha.powi(m.min(i32::MAX as usize) as i32);
    let beta_closed = (1.0 + am) / ((1.0 - am) * root);
    let beta_sum = (0..m)
        .map(|j| {
            let s = (PI * j as f64 / m as f64).sin();
            1.0 / (1.0 + 4.0 * sigma * s * s)
        })
        .sum::<f64>()
        / m as f64;
    Ok(BetaResult {
        sigma,
        m,
        beta_closed,
        beta_sum,
        alpha,
        beta_limit: 1.0 / root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let b = compute_beta(1.0, 1000).unwrap();
        assert!((b.beta_closed - 0.447).abs() < 5e-4);
        let b = compute_beta(1.0, 2).unwrap();
        assert!((b.beta_sum - 0.6).abs() < 1e-15);
        assert!((b.beta_closed - 0.6).abs() < 1e-14);
        let b = compute_beta(1.0, 100_000).unwrap();
        assert!((b.beta_closed - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((b.beta_limit - 0.447_213_595_499_958).abs() < 1e-14);
        let b = compute_beta(0.0, 17).unwrap();
        assert_eq!((b.beta_closed, b.beta_sum), (1.0, 1.0));
    }

    #[test]
    fn alpha_is_the_inner_root() {
        for &s in &[1e-8, 0.5, 1.0, 5.0, 1e6] {
            let a = compute_beta(s, 3).unwrap().alpha;
            assert!(a > 0.0 && a < 1.0);
            let naive = (2.0 * s + 1.0 - (4.0 * s + 1.0).sqrt()) / (2.0 * s);
            if s >= 0.5 {
                assert!((a - naive).abs() < 1e-14);
            }
            assert!((-s * a * a + (2.0 * s + 1.0) * a - s).abs() < 1e-9 * (1.0 + s));
        }
    }

    #[test]
    fn closed_form_matches_sum() {
        for &s in &[0.5, 1.0, 2.0, 3.0, 4.0, 5.0] {
            for &m in &[1usize, 2, 10, 100, 1000, 100_000] {
                let b = compute_beta(s, m).unwrap();
                assert!(
                    (b.beta_closed - b.beta_sum).abs() <= 1e-12 * b.beta_closed,
                    "σ={s} m={m}: {} vs {}",
                    b.beta_closed,
                    b.beta_sum
                );
            }
        }
    }

    #[test]
    fn monotone_in_m_and_sigma() {
        for &s in &[0.5, 1.0, 3.0] {
            let mut prev = f64::INFINITY;
            for m in 1..40 {
                let b = compute_beta(s, m).unwrap();
                assert!(b.beta_closed <= prev + 1e-15);
                assert!(b.beta_closed >= b.beta_limit);
                prev = b.beta_closed;
            }
        }
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let b = compute_beta(k as f64 * 0.5, 1000).unwrap().beta_closed;
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(compute_beta(-1.0, 10).is_err());
        assert!(compute_beta(f64::NAN, 10).is_err());
        assert_eq!(compute_beta(1.0, 0), Err(TheoryError::EmptyDimension));
    }
}
