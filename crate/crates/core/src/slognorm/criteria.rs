//! Closed-form stability tests for the scalar and diagonal-drift 2x2 cases.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar dX = αX dt + βX dW: stable in the mean (l = 1) when
/// ℜα + ½|β|² ≤ 0, in mean square (l = 2) when 2ℜα + |β|² ≤ 0.
pub fn scalar_stability(alpha: Complex64, beta: Complex64, l: u32) -> Result<bool> {
    match l {
        1 => Ok(alpha.re + 0.5 * beta.norm_sqr() <= 0.0),
        2 => Ok(2.0 * alpha.re + beta.norm_sqr() <= 0.0),
        _ => Err(Error::arg(format!("scalar criterion defined for l = 1 or 2, got {l}"))),
    }
}

/// Mean-square stability in the ∞-norm for A = diag(λ₁, λ₂) and
/// B = [[α₁, β₁], [β₂, α₂]]:
/// 2 max{λ₁, λ₂} + 2(5/4 · max{|α₁|+|β₁|, |α₂|+|β₂|} + 1)² ≤ 0.
pub fn twobytwo_inf_ms_stable(
    lambda1: f64,
    lambda2: f64,
    alpha1: Complex64,
    beta1: Complex64,
    alpha2: Complex64,
    beta2: Complex64,
) -> bool {
    let row = f64::max(alpha1.norm() + beta1.norm(), alpha2.norm() + beta2.norm());
    2.0 * lambda1.max(lambda2) + 2.0 * (1.25 * row + 1.0).powi(2) <= 0.0
}
