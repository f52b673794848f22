use rand::Rng;
use rand_distr::StandardNormal;

use super::{validate_l, Estimator, NuEstimate};
use crate::error::Result;
use crate::lognorm::{mu, mu_square};
use crate::matrix::ComplexMatrix;
use crate::mc::{reduce, substream, McConfig};
use crate::norm::NormKind;
use crate::system::SdeSystem;

/// Evaluates μ_p(C + Σ ζᵢBᵢ) for the per-sample draws. For p = 2 the
/// Hermitian parts are precomputed so each sample is a single λ_max.
pub(crate) struct PerturbedMu {
    p: NormKind,
    base: ComplexMatrix,
    directions: Vec<ComplexMatrix>,
}

impl PerturbedMu {
    pub(crate) fn new(sys: &SdeSystem, p: NormKind) -> Self {
        let c = sys.ito_drift();
        let (base, directions) = match p {
            NormKind::Two => (
                c.hermitian_part().expect("square"),
                sys.diffusions()
                    .iter()
                    .map(|b| b.hermitian_part().expect("square"))
                    .collect(),
            ),
            _ => (c, sys.diffusions().to_vec()),
        };
        Self { p, base, directions }
    }

    /// The perturbed matrix itself (Hermitian part when p = 2).
    pub(crate) fn matrix(&self, zeta: &[f64]) -> ComplexMatrix {
        let mut m = self.base.clone();
        for (b, &z) in self.directions.iter().zip(zeta) {
            m.add_scaled(z, b);
        }
        m
    }

    pub(crate) fn eval(&self, zeta: &[f64]) -> f64 {
        let m = self.matrix(zeta);
        match self.p {
            NormKind::Two => crate::eigen::lambda_max_trusted(&m),
            p => mu_square(&m, p),
        }
    }
}

pub(crate) fn draw_normals(seed: u64, index: u64, m: usize) -> Vec<f64> {
    let mut rng = substream(seed, index);
    (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// ν_p^l = l·E μ_p(A − ½ΣB² + ΣBζ) by Monte Carlo.
///
/// With `cfg.antithetic` each sample averages the draws ζ and −ζ, and
/// `samples` counts those pairs. A system without diffusion returns
/// l·μ_p(A) exactly.
pub fn nu_direct(sys: &SdeSystem, p: NormKind, l: u32, cfg: &McConfig) -> Result<NuEstimate> {
    validate_l(l)?;
    cfg.validate()?;
    let lf = f64::from(l);
    let estimate = |value, std_error| NuEstimate {
        value,
        std_error,
        samples: cfg.samples,
        estimator: Estimator::Direct,
        p,
        l,
        h_used: None,
        extrapolation: None,
    };
    if sys.channels() == 0 {
        return Ok(estimate(lf * mu(sys.drift(), p)?, 0.0));
    }

    let kernel = PerturbedMu::new(sys, p);
    let m = sys.channels();
    let moments = reduce(cfg.samples, 1, cfg.workers, |i, out| {
        let zeta = draw_normals(cfg.seed, i, m);
        out[0] = if cfg.antithetic {
            let neg: Vec<f64> = zeta.iter().map(|z| -z).collect();
            0.5 * lf * (kernel.eval(&zeta) + kernel.eval(&neg))
        } else {
            lf * kernel.eval(&zeta)
        };
        Ok(())
    })?;
    Ok(estimate(moments.mean[0], moments.std_error[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64, b: f64) -> SdeSystem {
        SdeSystem::single(
            ComplexMatrix::from_real_rows([[a]]),
            ComplexMatrix::from_real_rows([[b]]),
        )
        .unwrap()
    }

    #[test]
    fn scalar_case_is_exact_with_antithetic_pairs() {
        let est = nu_direct(&scalar(-100.0, 10.0), NormKind::Two, 2, &McConfig::new(10_000, 1)).unwrap();
        assert!((est.value + 300.0).abs() < 1e-9, "{}", est.value);
        assert!(est.std_error < 1e-9);
    }

    #[test]
    fn scalar_case_without_antithetic_has_noise() {
        let cfg = McConfig::new(20_000, 1).with_antithetic(false);
        let est = nu_direct(&scalar(-100.0, 10.0), NormKind::Two, 2, &cfg).unwrap();
        // statistic is 2(-150 + 10ζ): sd 20
        assert!((est.std_error - 20.0 / (20_000f64).sqrt()).abs() < 0.01);
        assert!((est.value + 300.0).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn deterministic_system_returns_l_mu() {
        let a = ComplexMatrix::from_real_rows([[-1.0, 4.0], [0.5, -3.0]]);
        let sys = SdeSystem::deterministic(a.clone()).unwrap();
        for p in NormKind::ALL {
            let est = nu_direct(&sys, p, 3, &McConfig::new(100, 0)).unwrap();
            assert_eq!(est.value, 3.0 * mu(&a, p).unwrap());
            assert_eq!(est.std_error, 0.0);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let sys = scalar(-1.0, 1.0);
        assert!(nu_direct(&sys, NormKind::Two, 0, &McConfig::new(10, 0)).is_err());
        assert!(nu_direct(&sys, NormKind::Two, 1, &McConfig::new(1, 0)).is_err());
    }
}
