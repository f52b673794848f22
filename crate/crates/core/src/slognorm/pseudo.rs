use serde::Serialize;

use super::direct::{draw_normals, PerturbedMu};
use crate::eigen::spectrum;
use crate::error::Result;
use crate::mc::{reduce, McConfig};
use crate::norm::NormKind;
use crate::system::SdeSystem;

/// Paired Monte Carlo comparison of the mean rightmost eigenvalue of the
/// noise-perturbed Itô drift with ½ν₂².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudospectrumCheck {
    /// E max ℜλ(A − ½ΣB² + ΣBζ)
    pub estimate: f64,
    pub estimate_std_error: f64,
    /// E μ₂(A − ½ΣB² + ΣBζ) = ½ν₂²
    pub half_nu: f64,
    pub half_nu_std_error: f64,
    /// Standard error of the paired difference half_nu − estimate.
    pub gap_std_error: f64,
    pub samples: u64,
    pub inequality_holds: bool,
}

/// Checks E max ℜλ ≤ ½ν₂² within three standard errors of the paired
/// difference.
pub fn expected_max_re_perturbed(sys: &SdeSystem, cfg: &McConfig) -> Result<PseudospectrumCheck> {
    cfg.validate()?;
    let m = sys.channels();
    let c = sys.ito_drift();
    let mu2 = PerturbedMu::new(sys, NormKind::Two);
    let point = |zeta: &[f64]| -> Result<(f64, f64)> {
        let mut mat = c.clone();
        for (b, &z) in sys.diffusions().iter().zip(zeta) {
            mat.add_scaled(z, b);
        }
        let re = spectrum(&mat)?.max_real_part();
        Ok((re, mu2.eval(zeta)))
    };
    let moments = reduce(cfg.samples, 3, cfg.workers, |i, out| {
        let zeta = draw_normals(cfg.seed, i, m);
        let (mut re, mut half) = point(&zeta)?;
        if cfg.antithetic && m > 0 {
            let neg: Vec<f64> = zeta.iter().map(|z| -z).collect();
            let (re2, half2) = point(&neg)?;
            re = 0.5 * (re + re2);
            half = 0.5 * (half + half2);
        }
        out[0] = re;
        out[1] = half;
        out[2] = half - re;
        Ok(())
    })?;
    let (estimate, half_nu) = (moments.mean[0], moments.mean[1]);
    let gap_std_error = moments.std_error[2];
    let slack = 3.0 * gap_std_error + 1e-12 * half_nu.abs().max(estimate.abs()).max(1.0);
    Ok(PseudospectrumCheck {
        estimate,
        estimate_std_error: moments.std_error[0],
        half_nu,
        half_nu_std_error: moments.std_error[1],
        gap_std_error,
        samples: moments.samples,
        inequality_holds: estimate <= half_nu + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lognorm::mu;
    use crate::matrix::ComplexMatrix;

    #[test]
    fn deterministic_reduction() {
        let a = ComplexMatrix::from_real_rows([[-1.0, 5.0], [0.0, -2.0]]);
        let sys = SdeSystem::deterministic(a.clone()).unwrap();
        let r = expected_max_re_perturbed(&sys, &McConfig::new(16, 0)).unwrap();
        assert!((r.estimate + 1.0).abs() < 1e-12);
        assert!((r.half_nu - mu(&a, NormKind::Two).unwrap()).abs() < 1e-12);
        assert!(r.inequality_holds);
    }

    #[test]
    fn identity_diffusion_shift() {
        // A − ½I + ζI: max ℜλ = max ℜλ(A) − ½ + ζ, μ₂ = μ₂(A) − ½ + ζ
        let a = ComplexMatrix::from_real_rows([[-1.0, 3.0], [0.0, -4.0]]);
        let sys = SdeSystem::single(a.clone(), ComplexMatrix::identity(2)).unwrap();
        let r = expected_max_re_perturbed(&sys, &McConfig::new(64, 1)).unwrap();
        assert!((r.estimate - (-1.5)).abs() < 1e-9);
        assert!((r.half_nu - (mu(&a, NormKind::Two).unwrap() - 0.5)).abs() < 1e-9);
        assert!(r.inequality_holds);
    }
}
