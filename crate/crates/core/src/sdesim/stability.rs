use num_complex::Complex64;

/// Mean-square stability function of Milstein on dX = λX dt + μX dW:
/// R(h) = |1 + hλ|² + |hμ²| + ½|h²μ⁴|.
pub fn milstein_r(h: f64, lambda: Complex64, mu: Complex64) -> f64 {
    let mu2 = mu * mu;
    (1.0 + h * lambda).norm_sqr() + (h * mu2).norm() + 0.5 * (h * h * mu2 * mu2).norm()
}

/// R(h) < 1.
pub fn milstein_ms_stable(h: f64, lambda: Complex64, mu: Complex64) -> bool {
    milstein_r(h, lambda, mu) < 1.0
}

/// Euler-Maruyama on A = diag(λ₁, λ₂), B = [[α₁, β₁], [β₂, α₂]]:
/// max{(1 + λ₁h)² + (|α₁| + |β₁|)², (1 + λ₂h)² + (|α₂| + |β₂|)²} < 1.
pub fn em_2x2_ms_stable(
    h: f64,
    lambda1: f64,
    lambda2: f64,
    alpha1: Complex64,
    beta1: Complex64,
    alpha2: Complex64,
    beta2: Complex64,
) -> bool {
    let row = |lambda: f64, a: Complex64, b: Complex64| (1.0 + lambda * h).powi(2) + (a.norm() + b.norm()).powi(2);
    row(lambda1, alpha1, beta1).max(row(lambda2, alpha2, beta2)) < 1.0
}
