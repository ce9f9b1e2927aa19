use super::SmoothingError;

/// Central-difference weights of `Lⁿ`, i.e. the `2n`-th difference stencil.
///
/// Stored as `c₁ … c₂ₙ₊₁` (zero-based here) with the centre at index `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    order: usize,
    coeffs: Vec<f64>,
}

impl Stencil {
    /// Builds `cⁿ` by repeated convolution with `(1, -2, 1)` starting from `c¹`.
    pub fn new(order: usize) -> Result<Self, SmoothingError> {
        if order == 0 {
            return Err(SmoothingError::ZeroOrder);
        }
        let mut coeffs = vec![1.0, -2.0, 1.0];
        for n in 2..=order {
            let prev = coeffs;
            let len = 2 * n + 1;
            // prev has length 2n-1; read outside its range as zero.
            let at = |k: isize| -> f64 {
                if k < 0 || k as usize >= prev.len() {
                    0.0
                } else {
                    prev[k as usize]
                }
            };
            coeffs = (0..len as isize)
                .map(|i| at(i - 2) - 2.0 * at(i - 1) + at(i))
                .collect();
        }
        Ok(Self { order, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Smallest dimension the stencil fits on without its halves overlapping.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    /// Lays the stencil out as the first column of the circulant `Lⁿ` of size `m`:
    /// centre at index 0, right half at `1..=n`, left half at `m-n..m`.
    pub fn wrapped(&self, m: usize) -> Result<Vec<f64>, SmoothingError> {
        let n = self.order;
        if m < self.width() {
            return Err(SmoothingError::DimensionTooSmall {
                dim: m,
                required: self.width(),
            });
        }
        let mut v = vec![0.0; m];
        v[0] = self.coeffs[n];
        for k in 1..=n {
            v[k] = self.coeffs[n + k];
            v[m - k] = self.coeffs[n - k];
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_binomial(n: usize, i: usize) -> f64 {
        // (-1)^i C(2n, i), zero-based i
        let mut c = 1.0;
        for k in 0..i {
            c = c * (2 * n - k) as f64 / (k + 1) as f64;
        }
        if i.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }

    #[test]
    fn low_orders() {
        assert_eq!(Stencil::new(1).unwrap().coeffs(), &[1.0, -2.0, 1.0]);
        assert_eq!(
            Stencil::new(2).unwrap().coeffs(),
            &[1.0, -4.0, 6.0, -4.0, 1.0]
        );
        assert_eq!(
            Stencil::new(3).unwrap().coeffs(),
            &[1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0]
        );
    }

    #[test]
    fn order_zero_rejected() {
        assert_eq!(Stencil::new(0), Err(SmoothingError::ZeroOrder));
    }

    #[test]
    fn matches_signed_binomials_and_invariants() {
        for n in 1..=10 {
            let s = Stencil::new(n).unwrap();
            let c = s.coeffs();
            assert_eq!(c.len(), 2 * n + 1);
            for i in 0..c.len() {
                assert_eq!(c[i], signed_binomial(n, i), "n={n} i={i}");
                assert_eq!(c[i], c[c.len() - 1 - i]);
            }
            assert_eq!(c.iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn wrapped_layout() {
        let s = Stencil::new(1).unwrap();
        assert_eq!(s.wrapped(5).unwrap(), vec![-2.0, 1.0, 0.0, 0.0, 1.0]);
        let s2 = Stencil::new(2).unwrap();
        assert_eq!(s2.wrapped(5).unwrap(), vec![6.0, -4.0, 1.0, 1.0, -4.0]);
        assert!(matches!(
            s2.wrapped(4),
            Err(SmoothingError::DimensionTooSmall {
                dim: 4,
                required: 5
            })
        ));
    }
}
