use lapsmooth::optimizers::{run, Method, OptimizerState, RunConfig, Schedule};
use lapsmooth::problems::{
    DenseQuadratic, DiagonalQuadratic, FindCenter, GaussianNoise, Problem, Rosenbrock,
};
use lapsmooth::smoothing::SmootherPlan;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Dense `I − σL` for the periodic first-order Laplacian, `m ≥ 3`.
fn dense_a(m: usize, sigma: f64) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |i, j| {
        let d = (i + m - j) % m;
        match d {
            0 => 1.0 + 2.0 * sigma,
            1 => -sigma,
            _ if d == m - 1 => -sigma,
            _ => 0.0,
        }
    })
}

fn energy(a: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(x);
    (v.transpose() * a * &v)[(0, 0)].sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_sigma_matches_plain_bitwise(
        seed in any::<u64>(),
        pick in 0usize..4,
        eps in 0.0..0.5f64,
    ) {
        let pairs = [
            (Method::Lssgd, Method::Sgd),
            (Method::LsNag, Method::Nag),
            (Method::LsRmsProp, Method::RmsProp),
            (Method::Lsgd, Method::Gd),
        ];
        let (ls, plain) = pairs[pick];
        let p = GaussianNoise::new(DiagonalQuadratic::ill_conditioned_100(), eps);
        let eta = if ls == Method::LsRmsProp { 1e-3 } else { 0.05 };
        let a = RunConfig::new(ls, Schedule::constant(eta), 50).with_seed(seed);
        let b = RunConfig::new(plain, Schedule::constant(eta), 50).with_seed(seed);
        let w0 = vec![1.0; 100];
        let ta = run(&p, &a, &w0).unwrap();
        let tb = run(&p, &b, &w0).unwrap();
        prop_assert_eq!(ta.losses(), tb.losses());
        prop_assert_eq!(ta.final_weights, tb.final_weights);
    }

    #[test]
    fn smoothed_gd_descends(
        coeffs in prop::collection::vec(0.01..1.0f64, 3..40),
        sigma in 0.0..10.0f64,
        frac in 0.05..0.99f64,
    ) {
        let p = DiagonalQuadratic::new(coeffs.clone()).unwrap();
        let eta = frac * 2.0 / p.lipschitz_constant().unwrap();
        let cfg = RunConfig::new(Method::Lsgd, Schedule::constant(eta), 100).with_sigma(Schedule::constant(sigma));
        let w0: Vec<f64> = (0..coeffs.len()).map(|i| (i as f64).sin() + 1.0).collect();
        let losses = run(&p, &cfg, &w0).unwrap().losses();
        for k in 1..losses.len() {
            prop_assert!(losses[k] <= losses[k - 1] * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn energy_norm_contracts_within_spectral_bound(
        m in 3usize..24,
        sigma in 0.0..5.0f64,
        seed in any::<u64>(),
    ) {
        // Random SPD Hessian Q = XXᵀ/m + 0.1 I; f = ½wᵀQw.
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let x = DMatrix::from_fn(m, m, |_, _| next());
        let q = &x * x.transpose() / m as f64 + DMatrix::identity(m, m) * 0.1;
        let norm_q = q.clone().symmetric_eigen().eigenvalues.max();
        let eta = 1.0 / norm_q;
        let a = dense_a(m, sigma);
        // Contraction factor max |1 − ημ| over the spectrum of A^{-1/2} Q A^{-1/2}.
        let e = a.clone().symmetric_eigen();
        let inv_sqrt = &e.eigenvectors
            * DMatrix::from_diagonal(&e.eigenvalues.map(|l| 1.0 / l.sqrt()))
            * e.eigenvectors.transpose();
        let mu = (&inv_sqrt * &q * &inv_sqrt).symmetric_eigen().eigenvalues;
        let rho = mu.iter().map(|u| (1.0 - eta * u).abs()).fold(0.0, f64::max);

        let problem = DenseQuadratic::new(m, q.transpose().as_slice().to_vec()).unwrap();
        let mut opt = OptimizerState::new(vec![1.0; m])
            .with_smoother(SmootherPlan::new(m, 1, sigma).unwrap())
            .unwrap();
        let mut prev = energy(&a, opt.weights());
        for _ in 0..30 {
            let g = problem.gradient(opt.weights());
            opt.lsgd_step(&g, eta).unwrap();
            let now = energy(&a, opt.weights());
            prop_assert!(now <= rho * prev * (1.0 + 1e-9) + 1e-300);
            prev = now;
        }
    }
}

#[test]
fn smoothed_sgd_gap_not_above_sgd() {
    let p = GaussianNoise::new(DiagonalQuadratic::ill_conditioned_100(), 0.1);
    let w0 = vec![1.0; 100];
    let gap = |method: Method, sigma: f64| {
        (0..10)
            .map(|seed| {
                let cfg = RunConfig::new(method, Schedule::constant(0.1), 1500)
                    .with_sigma(Schedule::constant(sigma))
                    .with_seed(seed);
                run(&p, &cfg, &w0).unwrap().final_loss()
            })
            .sum::<f64>()
            / 10.0
    };
    assert!(gap(Method::Lssgd, 10.0) <= gap(Method::Sgd, 0.0));
}

#[test]
fn full_batch_sgd_equals_gd() {
    let p = FindCenter::random(40, 6, 3).unwrap();
    let w0 = vec![2.0; 6];
    let sgd = RunConfig::new(Method::Sgd, Schedule::constant(0.3), 40)
        .with_batch(40)
        .with_seed(9);
    let gd = RunConfig::new(Method::Gd, Schedule::constant(0.3), 40);
    assert_eq!(
        run(&p, &sgd, &w0).unwrap().final_weights,
        run(&p, &gd, &w0).unwrap().final_weights
    );
}

#[test]
fn runs_are_reproducible() {
    let p = Rosenbrock::new(10).unwrap();
    let w0: Vec<f64> = (0..10)
        .map(|i| if i % 2 == 0 { -1.0 } else { 1.5 })
        .collect();
    for method in Method::ALL {
        let cfg = RunConfig::new(method, Schedule::constant(1e-4), 30)
            .with_sigma(Schedule::constant(0.5))
            .with_seed(4);
        let a = run(&p, &cfg, &w0).unwrap();
        let b = run(&p, &cfg, &w0).unwrap();
        assert_eq!(a.to_csv(), b.to_csv(), "{method}");
    }
}
