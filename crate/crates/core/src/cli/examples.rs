//! The inverted pendulum and the nonnormal drift example.

use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};

use num_complex::Complex64;
use statrs::function::erf::erf;

use crate::matrix::ComplexMatrix;
use crate::system::SdeSystem;

/// E|X| for X ~ N(mean, sd²).
pub fn folded_normal_mean(mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return mean.abs();
    }
    let z = mean / (sd * SQRT_2);
    // √(2/π) = FRAC_2_SQRT_PI / √2
    sd * FRAC_2_SQRT_PI / SQRT_2 * (-z * z).exp() + mean * erf(z)
}

/// dθ = v dt + εv dW, dv = (g/l)θ dt + bθ dW.
pub fn pendulum_system(g_over_l: f64, epsilon: f64, b: f64) -> SdeSystem {
    SdeSystem::single(
        ComplexMatrix::from_real_rows([[0.0, 1.0], [g_over_l, 0.0]]),
        ComplexMatrix::from_real_rows([[0.0, epsilon], [b, 0.0]]),
    )
    .expect("2x2")
}

pub fn validate_pendulum(g_over_l: f64, epsilon: f64, b: f64) -> Result<(), String> {
    if !(g_over_l > 0.0 && g_over_l.is_finite()) {
        return Err(format!("g/l must be positive, got {g_over_l}"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(format!("b must be nonnegative, got {b}"));
    }
    Ok(())
}

/// ν₂² of the pendulum: E|N(1 + g/l, (b + ε)²)| − εb.
pub fn pendulum_nu(g_over_l: f64, epsilon: f64, b: f64) -> f64 {
    folded_normal_mean(1.0 + g_over_l, b + epsilon) - epsilon * b
}

/// Smallest b satisfying the necessary condition b ≥ (1 + g/l)/ε.
pub fn pendulum_threshold(g_over_l: f64, epsilon: f64) -> f64 {
    (1.0 + g_over_l) / epsilon
}

/// A = [[−1, b], [0, −1]], B = [[0, σ], [−σ, 0]] with σ = √σ² for σ² ≥ 0
/// and σ = i√|σ²| otherwise.
pub fn nonnormal_system(b: f64, sigma_sq: f64) -> SdeSystem {
    let sigma = if sigma_sq >= 0.0 {
        Complex64::new(sigma_sq.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-sigma_sq).sqrt())
    };
    let zero = Complex64::new(0.0, 0.0);
    SdeSystem::single(
        ComplexMatrix::from_real_rows([[-1.0, b], [0.0, -1.0]]),
        ComplexMatrix::from_rows([[zero, sigma], [-sigma, zero]]),
    )
    .expect("2x2")
}

/// max{σ² − 2 ± b} = σ² − 2 + |b|.
pub fn nonnormal_nu(b: f64, sigma_sq: f64) -> f64 {
    sigma_sq - 2.0 + b.abs()
}

/// Largest σ² with ν₂² ≤ 0: min{2 ∓ b} = 2 − |b|.
pub fn nonnormal_sigma_sq_limit(b: f64) -> f64 {
    2.0 - b.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::McConfig;
    use crate::norm::NormKind;
    use crate::slognorm::nu_direct;

    #[test]
    fn folded_normal_limits() {
        assert_eq!(folded_normal_mean(-3.0, 0.0), 3.0);
        // E|N(0,1)| = √(2/π)
        assert!((folded_normal_mean(0.0, 1.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!((folded_normal_mean(50.0, 1.0) - 50.0).abs() < 1e-12);
        assert!((folded_normal_mean(-2.0, 3.0) - folded_normal_mean(2.0, 3.0)).abs() < 1e-14);
    }

    #[test]
    fn pendulum_closed_form_matches_direct_estimate() {
        let (g, eps, b) = (10.0, 0.1, 50.0);
        let closed = pendulum_nu(g, eps, b);
        assert!(closed > 0.0);
        assert!(closed >= 11.0 - 5.0);
        let est = nu_direct(
            &pendulum_system(g, eps, b),
            NormKind::Two,
            2,
            &McConfig::new(200_000, 1),
        )
        .unwrap();
        assert!(
            (est.value - closed).abs() < 4.0 * est.std_error,
            "{} vs {closed}",
            est.value
        );
        assert!((pendulum_threshold(g, eps) - 110.0).abs() < 1e-12);
    }

    #[test]
    fn nonnormal_examples() {
        assert_eq!(nonnormal_nu(1.0, 1.0), 0.0);
        assert_eq!(nonnormal_sigma_sq_limit(3.0), -1.0);
        let est = nu_direct(&nonnormal_system(-3.0, 0.25), NormKind::Two, 2, &McConfig::new(1000, 2)).unwrap();
        assert!((est.value - nonnormal_nu(-3.0, 0.25)).abs() < 1e-12);
        assert_eq!(est.std_error, 0.0);
        assert!(validate_pendulum(10.0, 1.5, 1.0).is_err());
    }
}
