use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slognorm::eigen::spectrum;
use slognorm::sdesim::{em_step, milstein_step};
use slognorm::slognorm::{
    bounds_report, default_h_seq, iterated_integral_sampler, nu_definitional, nu_direct, IteratedIntegrals,
    DEFAULT_H_STEPS,
};
use slognorm::{mu, mu_limit_check, Complex64, ComplexMatrix, McConfig, NormKind, SdeSystem};

const NORMS: [NormKind; 3] = [NormKind::One, NormKind::Two, NormKind::Inf];

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n * n).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        ComplexMatrix::new(n, n, data).unwrap()
    })
}

fn real_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-10.0..10.0f64, n * n).prop_map(move |v| ComplexMatrix::from_real(n, n, &v).unwrap())
}

fn pair() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    (1usize..=5).prop_flat_map(|n| (matrix(n), matrix(n)))
}

fn system() -> impl Strategy<Value = SdeSystem> {
    (1usize..=3, 0usize..=2).prop_flat_map(|(n, m)| {
        (
            real_matrix(n),
            prop::collection::vec(real_matrix(n).prop_map(|b| b.scale(0.3)), m),
        )
            .prop_map(|(a, bs)| SdeSystem::new(a, bs).unwrap())
    })
}

fn tol(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mu_is_positively_homogeneous((a, _) in pair(), alpha in 0.0..50.0f64) {
        for p in NORMS {
            let lhs = mu(&a.scale(alpha), p).unwrap();
            let rhs = alpha * mu(&a, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= tol(rhs), "{p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn mu_is_subadditive((a, b) in pair()) {
        let mut sum = a.clone();
        sum.add_scaled(1.0, &b);
        for p in NORMS {
            let lhs = mu(&sum, p).unwrap();
            let rhs = mu(&a, p).unwrap() + mu(&b, p).unwrap();
            prop_assert!(lhs <= rhs + tol(rhs), "{p}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn mu_shifts_with_identity((a, _) in pair(), c in -20.0..20.0f64, d in -20.0..20.0f64) {
        let n = a.rows();
        let shifted = &a + &ComplexMatrix::identity(n).scale_complex(Complex64::new(c, d));
        for p in NORMS {
            let lhs = mu(&shifted, p).unwrap();
            let rhs = mu(&a, p).unwrap() + c;
            prop_assert!((lhs - rhs).abs() <= tol(rhs), "{p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn mu_lies_between_spectral_abscissa_and_norm((a, _) in pair()) {
        let abscissa = spectrum(&a).unwrap().max_real_part();
        for p in NORMS {
            let m = mu(&a, p).unwrap();
            let norm = a.norm(p);
            prop_assert!(abscissa <= m + 1e-7 * norm.max(1.0), "{p}: {abscissa} > {m}");
            prop_assert!(m.abs() <= norm + tol(norm), "{p}: |{m}| > {norm}");
        }
    }

    #[test]
    fn mu_matches_its_limit_definition((a, _) in pair()) {
        for p in NORMS {
            let exact = mu(&a, p).unwrap();
            let h: Vec<f64> = (0..6).map(|k| 1e-5 / 2f64.powi(k)).collect();
            let approx = mu_limit_check(&a, p, &h).unwrap();
            prop_assert!((approx - exact).abs() <= 1e-3 * exact.abs().max(1.0), "{p}: {approx} vs {exact}");
        }
    }

    #[test]
    fn iterated_integrals_satisfy_ito_identities(m in 1usize..=4, h in 1e-4..1.0f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = iterated_integral_sampler(m, h, &mut rng);
        for i in 0..m {
            let d = 0.5 * (s.dw[i] * s.dw[i] - h);
            prop_assert!((s.get(i, i) - d).abs() <= 1e-12 * d.abs().max(1.0));
            for j in 0..m {
                let prod = s.dw[i] * s.dw[j];
                let sum = if i == j { 2.0 * s.get(i, i) + h } else { s.get(i, j) + s.get(j, i) };
                prop_assert!((sum - prod).abs() <= 1e-12 * prod.abs().max(1.0));
            }
        }
    }

    #[test]
    fn noise_free_steps_agree(a in (1usize..=4).prop_flat_map(matrix), h in 1e-4..0.1f64) {
        let n = a.rows();
        let sys = SdeSystem::deterministic(a.clone()).unwrap();
        let x: Vec<Complex64> = (0..n).map(|k| Complex64::new(1.0 + k as f64, -0.5)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = iterated_integral_sampler(1, h, &mut rng);
        let em = em_step(&sys, &x, &[], h).unwrap();
        let no_noise = IteratedIntegrals { dw: vec![], integrals: vec![] };
        let mil = milstein_step(&sys, &x, &no_noise, h).unwrap();
        let ax = a.apply(&x).unwrap();
        for k in 0..n {
            let expect = x[k] + ax[k] * h;
            prop_assert!((em[k] - expect).norm() <= 1e-12 * expect.norm().max(1.0));
            prop_assert_eq!(em[k], mil[k]);
        }
        prop_assert!(milstein_step(&sys, &x, &noise, h).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn direct_estimate_respects_closed_form_bounds(sys in system(), seed in any::<u64>()) {
        for p in NORMS {
            for l in [1u32, 2, 4] {
                let est = nu_direct(&sys, p, l, &McConfig::new(2000, seed)).unwrap();
                let r = bounds_report(&sys, p, l).unwrap();
                let slack = 5.0 * est.std_error + tol(est.value);
                let upper = r.mu_upper.value.unwrap();
                let lower = r.mu_lower.value.unwrap();
                let abs = r.abs_bound.value.unwrap();
                prop_assert!(est.value <= upper + slack, "{p} l={l}: {} > {upper}", est.value);
                prop_assert!(est.value >= lower - slack, "{p} l={l}: {} < {lower}", est.value);
                prop_assert!(est.value.abs() <= abs + slack, "{p} l={l}: |{}| > {abs}", est.value);
            }
        }
    }

    #[test]
    fn direct_estimate_is_exact_without_noise(a in (1usize..=4).prop_flat_map(real_matrix), l in 1u32..=6) {
        let sys = SdeSystem::deterministic(a.clone()).unwrap();
        for p in NORMS {
            let est = nu_direct(&sys, p, l, &McConfig::new(10, 3)).unwrap();
            let exact = f64::from(l) * mu(&a, p).unwrap();
            prop_assert!((est.value - exact).abs() <= tol(exact));
            prop_assert_eq!(est.std_error, 0.0);
        }
    }

    #[test]
    fn direct_estimate_ignores_worker_count(sys in system(), seed in any::<u64>(), workers in 2usize..=6) {
        let one = nu_direct(&sys, NormKind::Two, 2, &McConfig::new(3000, seed)).unwrap();
        let many = nu_direct(&sys, NormKind::Two, 2, &McConfig::new(3000, seed).with_workers(workers)).unwrap();
        prop_assert_eq!(one.value.to_bits(), many.value.to_bits());
        prop_assert_eq!(one.std_error.to_bits(), many.std_error.to_bits());
    }
}

fn small_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
    use rand::Rng;
    let data: Vec<f64> = (0..n * n).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
    ComplexMatrix::from_real(n, n, &data).unwrap()
}

#[test]
fn definitional_perturbation_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let root2 = std::f64::consts::SQRT_2;
    let cfg = McConfig::new(4000, 42);
    let mut failures = Vec::new();
    for k in 0..10 {
        let (a, da) = (small_matrix(&mut rng, 3, 1.0), small_matrix(&mut rng, 3, 0.5));
        let (b, db) = (small_matrix(&mut rng, 3, 0.3), small_matrix(&mut rng, 3, 0.15));
        let sum = |x: &ComplexMatrix, y: &ComplexMatrix| x + y;
        let lhs_sys = SdeSystem::single(sum(&a, &da), sum(&b, &db)).unwrap();
        let h = default_h_seq(&lhs_sys, NormKind::Two, None, DEFAULT_H_STEPS);
        let nu = |drift: &ComplexMatrix, noise: ComplexMatrix, l: u32| {
            let sys = SdeSystem::single(drift.clone(), noise).unwrap();
            nu_definitional(&sys, NormKind::Two, l, &h, &cfg).unwrap()
        };
        let lhs1 = nu_definitional(&lhs_sys, NormKind::Two, 1, &h, &cfg).unwrap();
        let mut diff = b.clone();
        diff.add_scaled(-1.0, &db);
        let r1 = nu(&a, b.scale(root2), 1);
        let r2 = nu(&da, db.scale(root2), 1);
        let rhs = r1.value + r2.value + diff.square().unwrap().norm(NormKind::Two) / root2;
        let se = (lhs1.std_error.powi(2) + r1.std_error.powi(2) + r2.std_error.powi(2)).sqrt();
        if lhs1.value > rhs + 3.0 * se {
            failures.push(format!("pair {k}, split noise: {} > {rhs}", lhs1.value));
        }
        for l in [1u32, 2] {
            let lhs = nu_definitional(&lhs_sys, NormKind::Two, l, &h, &cfg).unwrap();
            let shared = sum(&b, &db).scale(1.0 / root2);
            let (r1, r2) = (nu(&a, shared.clone(), l), nu(&da, shared, l));
            let se = (lhs.std_error.powi(2) + r1.std_error.powi(2) + r2.std_error.powi(2)).sqrt();
            if lhs.value > r1.value + r2.value + 3.0 * se {
                failures.push(format!(
                    "pair {k}, shared noise, l={l}: {} > {}",
                    lhs.value,
                    r1.value + r2.value
                ));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}
