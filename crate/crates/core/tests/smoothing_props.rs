use lapsmooth::smoothing::{dense_solve_oracle, forward_difference, laplacian_power};
use lapsmooth::SmootherPlan;
use proptest::prelude::*;

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

fn vector(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (3..max_len).prop_flat_map(|m| prop::collection::vec(-10.0..10.0f64, m))
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = norm_sq(b).sqrt().max(1e-300);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
        <= tol * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_sqrt_energy_split(v in vector(300), sigma in 0.0..10.0f64) {
        let plan = SmootherPlan::new(v.len(), 1, sigma).unwrap();
        let w = plan.apply_inverse_sqrt(&v).unwrap();
        let lhs = norm_sq(&v);
        let rhs = norm_sq(&w) + sigma * norm_sq(&forward_difference(1, &w));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1e-300));
        let twice = plan.apply_inverse_sqrt(&w).unwrap();
        prop_assert!(rel_close(&twice, &plan.apply_inverse(&v).unwrap(), 1e-10));
    }

    #[test]
    fn inverse_energy_split(g in vector(300), n in 1usize..=3, sigma in 0.0..10.0f64) {
        // The identity is for the circulant operator; padded plans are excluded.
        prop_assume!(g.len() > 2 * n);
        let plan = SmootherPlan::new(g.len(), n, sigma).unwrap();
        let d = plan.apply_inverse(&g).unwrap();
        let lhs = norm_sq(&g);
        let rhs = norm_sq(&d)
            + 2.0 * sigma * norm_sq(&forward_difference(n, &d))
            + sigma * sigma * norm_sq(&laplacian_power(n, &d));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1e-300), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn maximum_principle(g in vector(300), sigma in 0.0..10.0f64) {
        let plan = SmootherPlan::new(g.len(), 1, sigma).unwrap();
        let d = plan.apply_inverse(&g).unwrap();
        let gmax = g.iter().cloned().fold(f64::MIN, f64::max);
        let gmin = g.iter().cloned().fold(f64::MAX, f64::min);
        let slack = 1e-12 * (gmax.abs() + gmin.abs());
        prop_assert!(d.iter().all(|&x| x <= gmax + slack && x >= gmin - slack));
    }

    #[test]
    fn sum_is_preserved(g in vector(300), n in 1usize..=3, sigma in 0.0..10.0f64) {
        // Zero padding below 2n+1 does not preserve sums.
        prop_assume!(g.len() > 2 * n);
        let plan = SmootherPlan::new(g.len(), n, sigma).unwrap();
        let d = plan.apply_inverse(&g).unwrap();
        let diff = d.iter().sum::<f64>() - g.iter().sum::<f64>();
        prop_assert!(diff.abs() <= 1e-10 * l1(&g));
    }

    #[test]
    fn difference_norms_shrink(g in vector(200), p in 0usize..=3, sigma in 0.1..10.0f64) {
        let plan = SmootherPlan::new(g.len(), 1, sigma).unwrap();
        let d = plan.apply_inverse(&g).unwrap();
        let dg = if p == 0 { g.clone() } else { forward_difference(p, &g) };
        let dd = if p == 0 { d.clone() } else { forward_difference(p, &d) };
        // Strict only when the differenced vector changes sign.
        let changes_sign = dg.iter().cloned().fold(f64::MIN, f64::max) > 1e-6
            && dg.iter().cloned().fold(f64::MAX, f64::min) < -1e-6;
        if changes_sign {
            prop_assert!(l1(&dd) < l1(&dg));
        } else {
            prop_assert!(l1(&dd) <= l1(&dg) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn forward_undoes_inverse(g in vector(400), n in 1usize..=3, sigma in 0.0..10.0f64) {
        let plan = SmootherPlan::new(g.len(), n, sigma).unwrap();
        let d = plan.apply_inverse(&g).unwrap();
        prop_assert!(rel_close(&plan.apply_forward(&d).unwrap(), &g, 1e-10));
        prop_assert!(rel_close(&plan.apply_forward_stencil(&d).unwrap(), &g, 1e-10));
        let f = plan.apply_forward(&g).unwrap();
        prop_assert!(rel_close(&plan.apply_forward_stencil(&g).unwrap(), &f, 1e-12));
    }

    #[test]
    fn spectral_matches_dense(
        g in vector(400),
        n in 1usize..=3,
        sigma in prop::sample::select(vec![0.0, 0.5, 1.0, 3.0, 10.0]),
    ) {
        let plan = SmootherPlan::new(g.len(), n, sigma).unwrap();
        let spectral = plan.apply_inverse(&g).unwrap();
        let dense = dense_solve_oracle(g.len(), n, sigma, &g).unwrap();
        prop_assert!(rel_close(&spectral, &dense, 1e-10));
    }
}

#[test]
fn spectral_matches_dense_at_size_limit() {
    let m = 4096;
    let g: Vec<f64> = (0..m).map(|i| ((i * 7919) % 101) as f64 - 50.0).collect();
    for n in 1..=3 {
        // plan construction asserts the two spectra agree
        SmootherPlan::new(m, n, 10.0).unwrap();
    }
    let plan = SmootherPlan::new(m, 3, 10.0).unwrap();
    let dense = dense_solve_oracle(m, 3, 10.0, &g).unwrap();
    assert!(rel_close(&plan.apply_inverse(&g).unwrap(), &dense, 1e-10));
}

#[test]
fn odd_and_prime_lengths() {
    for &m in &[50usize, 97, 100, 1000, 1009] {
        let g: Vec<f64> = (0..m).map(|i| (i as f64 * 0.37).sin()).collect();
        let plan = SmootherPlan::new(m, 2, 3.0).unwrap();
        let d = plan.apply_inverse(&g).unwrap();
        let dense = dense_solve_oracle(m, 2, 3.0, &g).unwrap();
        assert!(rel_close(&d, &dense, 1e-10), "m={m}");
    }
}
