use std::f64::consts::PI;

use super::{Problem, ProblemError};

/// `f(w) = Σᵢ cᵢ wᵢ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalQuadratic {
    coeffs: Vec<f64>,
}

impl DiagonalQuadratic {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, ProblemError> {
        if coeffs.is_empty() {
            return Err(ProblemError::InvalidDimension(0));
        }
        Ok(Self { coeffs })
    }

    /// 100-dimensional `Σ x²_{odd} + Σ x²_{even}/10²` (1-based coordinates).
    pub fn ill_conditioned_100() -> Self {
        Self {
            coeffs: (0..100)
                .map(|i| if i % 2 == 0 { 1.0 } else { 0.01 })
                .collect(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl Problem for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.coeffs.iter().zip(w).map(|(c, x)| c * x * x).sum()
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.coeffs
            .iter()
            .zip(w)
            .map(|(c, x)| 2.0 * c * x)
            .collect()
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim()])
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        Some(2.0 * self.coeffs.iter().cloned().fold(0.0, f64::max))
    }
}

/// `f(w) = ½ wᵀQw` for a symmetric positive-definite row-major `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseQuadratic {
    dim: usize,
    q: Vec<f64>,
}

impl DenseQuadratic {
    pub fn new(dim: usize, q: Vec<f64>) -> Result<Self, ProblemError> {
        if dim == 0 {
            return Err(ProblemError::InvalidDimension(0));
        }
        if q.len() != dim * dim {
            return Err(ProblemError::LengthMismatch {
                expected: dim * dim,
                found: q.len(),
            });
        }
        Ok(Self { dim, q })
    }

    pub fn matrix(&self) -> &[f64] {
        &self.q
    }
}

impl Problem for DenseQuadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        0.5 * self
            .gradient(w)
            .iter()
            .zip(w)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.q
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim])
    }
}

/// Chained Rosenbrock `Σᵢ (a − xᵢ)² + b(xᵢ₊₁ − xᵢ²)²` with `a = 1`, `b = 100`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rosenbrock {
    dim: usize,
    a: f64,
    b: f64,
}

impl Rosenbrock {
    pub fn new(dim: usize) -> Result<Self, ProblemError> {
        if dim < 2 {
            return Err(ProblemError::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            a: 1.0,
            b: 100.0,
        })
    }
}

impl Problem for Rosenbrock {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        w.windows(2)
            .map(|p| (self.a - p[0]).powi(2) + self.b * (p[1] - p[0] * p[0]).powi(2))
            .sum()
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for i in 0..self.dim - 1 {
            let r = w[i + 1] - w[i] * w[i];
            g[i] += -2.0 * (self.a - w[i]) - 4.0 * self.b * w[i] * r;
            g[i + 1] += 2.0 * self.b * r;
        }
        g
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![self.a; self.dim])
    }
}

/// Smooth convex well at `(π, π, π)` with narrow holes drilled on a circle of
/// radius `r` around it:
///
/// `−4 e^{−|p − π|²} − 4 Σᵢ cos x cos y e^{−β((x − r sin(i/2) − π)² + (y − r cos(i/2) − π)²)}`
/// for integers `0 ≤ i < 4π`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrilledHoles {
    radius: f64,
    narrowness: f64,
    centers: Vec<(f64, f64)>,
}

impl Default for DrilledHoles {
    fn default() -> Self {
        Self::new(1.0, 1.0 / 500f64.sqrt())
    }
}

impl DrilledHoles {
    pub fn new(radius: f64, narrowness: f64) -> Self {
        let count = (4.0 * PI).ceil() as usize;
        let centers = (0..count)
            .map(|i| {
                let h = i as f64 / 2.0;
                (radius * h.sin() + PI, radius * h.cos() + PI)
            })
            .collect();
        Self {
            radius,
            narrowness,
            centers,
        }
    }

    /// Hole centers in the `z = π` plane.
    pub fn hole_centers(&self) -> Vec<[f64; 3]> {
        self.centers.iter().map(|&(x, y)| [x, y, PI]).collect()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn well_center() -> [f64; 3] {
        [PI, PI, PI]
    }
}

impl Problem for DrilledHoles {
    fn dim(&self) -> usize {
        3
    }

    fn value(&self, w: &[f64]) -> f64 {
        let (x, y, z) = (w[0], w[1], w[2]);
        let well = -4.0 * (-((x - PI).powi(2) + (y - PI).powi(2) + (z - PI).powi(2))).exp();
        let c = x.cos() * y.cos();
        let holes: f64 = self
            .centers
            .iter()
            .map(|&(cx, cy)| (-self.narrowness * ((x - cx).powi(2) + (y - cy).powi(2))).exp())
            .sum();
        well - 4.0 * c * holes
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let (x, y, z) = (w[0], w[1], w[2]);
        let e0 = (-((x - PI).powi(2) + (y - PI).powi(2) + (z - PI).powi(2))).exp();
        let mut g = [
            8.0 * (x - PI) * e0,
            8.0 * (y - PI) * e0,
            8.0 * (z - PI) * e0,
        ];
        let (sx, cx_) = x.sin_cos();
        let (sy, cy_) = y.sin_cos();
        for &(cx, cy) in &self.centers {
            let e = (-self.narrowness * ((x - cx).powi(2) + (y - cy).powi(2))).exp();
            let two_b = 2.0 * self.narrowness;
            g[0] -= 4.0 * e * (-sx * cy_ - cx_ * cy_ * two_b * (x - cx));
            g[1] -= 4.0 * e * (-cx_ * sy - cx_ * cy_ * two_b * (y - cy));
        }
        g.to_vec()
    }
}

/// Radially symmetric `f(w) = ‖w‖²(1 + ½ sin(2π‖w‖))`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSin {
    dim: usize,
}

impl NormSin {
    pub fn new(dim: usize) -> Result<Self, ProblemError> {
        if dim == 0 {
            return Err(ProblemError::InvalidDimension(0));
        }
        Ok(Self { dim })
    }

    /// Value as a function of the radius.
    pub fn radial(r: f64) -> f64 {
        r * r * (1.0 + 0.5 * (2.0 * PI * r).sin())
    }
}

impl Problem for NormSin {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        Self::radial(w.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// `∇f = w·(2 + sin(2πr) + πr cos(2πr))`, which is `0` at the origin.
    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let r = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (s, c) = (2.0 * PI * r).sin_cos();
        let scale = 2.0 + s + PI * r * c;
        w.iter().map(|x| x * scale).collect()
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim])
    }
}

#[cfg(test)]
mod tests {
    use super::super::finite_difference_gradient;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_fd<P: Problem>(p: &P, points: usize, range: f64, center: f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..points {
            let w: Vec<f64> = (0..p.dim())
                .map(|_| center + rng.random_range(-range..range))
                .collect();
            let g = p.gradient(&w);
            let fd = finite_difference_gradient(p, &w);
            let err: f64 = g
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let scale: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt().max(1.0);
            assert!(err <= 1e-6 * scale, "{err} at {w:?}");
        }
    }

    #[test]
    fn quadratic_examples() {
        let q = DiagonalQuadratic::ill_conditioned_100();
        let ones = vec![1.0; 100];
        assert!((q.value(&ones) - 50.5).abs() < 1e-12);
        let g = q.gradient(&ones);
        assert!(g.iter().step_by(2).all(|&x| x == 2.0));
        assert!(g
            .iter()
            .skip(1)
            .step_by(2)
            .all(|&x| (x - 0.02).abs() < 1e-15));
        assert_eq!(q.value(&q.known_minimizer().unwrap()), 0.0);
        assert_eq!(q.lipschitz_constant(), Some(2.0));
        assert_fd(&q, 100, 5.0, 0.0, 1);
    }

    #[test]
    fn rosenbrock_examples() {
        let r = Rosenbrock::new(2).unwrap();
        assert_eq!(r.value(&[1.0, 1.0]), 0.0);
        assert_eq!(r.value(&[-3.0, -4.0]), 16916.0);
        assert_eq!(r.gradient(&[1.0, 1.0]), vec![0.0, 0.0]);
        assert!(Rosenbrock::new(1).is_err());
        let r10 = Rosenbrock::new(10).unwrap();
        assert_eq!(r10.value(&[1.0; 10]), 0.0);
        assert_fd(&r, 100, 2.0, 0.0, 2);
        assert_fd(&r10, 100, 2.0, 0.0, 3);
    }

    #[test]
    fn drilled_examples() {
        let d = DrilledHoles::default();
        assert_eq!(d.hole_centers().len(), 13);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let w = [rng.random_range(0.0..6.0), rng.random_range(0.0..6.0), PI];
            assert!(d.gradient(&w)[2].abs() < 1e-15);
        }
        assert_fd(&d, 100, 2.0, PI, 5);
    }

    #[test]
    fn norm_sin_examples() {
        let f = NormSin::new(5).unwrap();
        assert_eq!(f.value(&[0.0; 5]), 0.0);
        assert_eq!(f.gradient(&[0.0; 5]), vec![0.0; 5]);
        let unit = [0.6, 0.8, 0.0, 0.0, 0.0];
        assert!((f.value(&unit) - 1.0).abs() < 1e-14);
        assert_fd(&f, 100, 1.5, 0.0, 6);
    }

    #[test]
    fn dense_quadratic() {
        let q = DenseQuadratic::new(2, vec![2.0, 0.5, 0.5, 1.0]).unwrap();
        assert_eq!(q.gradient(&[1.0, 1.0]), vec![2.5, 1.5]);
        assert_eq!(q.value(&[1.0, 1.0]), 2.0);
        assert_fd(&q, 20, 3.0, 0.0, 7);
        assert!(DenseQuadratic::new(2, vec![1.0; 3]).is_err());
    }
}
