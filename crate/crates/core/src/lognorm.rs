//! Classical logarithmic norms μ₁, μ₂, μ∞.

use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::norm::NormKind;

/// Logarithmic norm μ_p(A) in closed form.
///
/// μ₁ and μ∞ take the real part of the diagonal and the modulus of the
/// off-diagonal column (resp. row) entries; μ₂ is λ_max of the Hermitian
/// part.
pub fn mu(a: &ComplexMatrix, p: NormKind) -> Result<f64> {
    a.ensure_square()?;
    Ok(mu_square(a, p))
}

/// `mu` for an input already known to be square.
pub(crate) fn mu_square(a: &ComplexMatrix, p: NormKind) -> f64 {
    let n = a.rows();
    match p {
        NormKind::One => (0..n)
            .map(|j| a[(j, j)].re + (0..n).filter(|&i| i != j).map(|i| a[(i, j)].norm()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
        NormKind::Inf => (0..n)
            .map(|i| a[(i, i)].re + (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
        NormKind::Two => eigen::lambda_max_trusted(&a.hermitian_part().expect("square")),
    }
}

/// Numerical cross-check of μ_p from its limit definition.
///
/// Evaluates the difference quotient (‖I + hA‖_p − 1)/h on every `h` and
/// returns the intercept of the least-squares line through the
/// (h, quotient) pairs.
pub fn mu_limit_check(a: &ComplexMatrix, p: NormKind, h_seq: &[f64]) -> Result<f64> {
    let n = a.dim()?;
    if h_seq.len() < 2 {
        return Err(Error::arg("mu_limit_check needs at least two step sizes"));
    }
    if h_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::arg("step sizes must be strictly decreasing"));
    }
    if h_seq.iter().any(|&h| !(h > 1e-10)) {
        return Err(Error::arg("step sizes must exceed 1e-10"));
    }
    let quotients: Vec<f64> = h_seq
        .iter()
        .map(|&h| {
            let mut m = a.scale(h);
            for i in 0..n {
                m[(i, i)].re += 1.0;
            }
            (m.norm(p) - 1.0) / h
        })
        .collect();
    Ok(linear_fit(h_seq, &quotients).intercept)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LineFit {
    pub intercept: f64,
    pub slope: f64,
}

/// Ordinary least squares y = intercept + slope·x.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&xi| (xi - xm) * (xi - xm)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&xi, &yi)| (xi - xm) * (yi - ym)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    LineFit {
        intercept: ym - slope * xm,
        slope,
    }
}

/// Weights w_k with intercept = Σ w_k y_k for the least-squares line on `x`.
pub(crate) fn intercept_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&xi| (xi - xm) * (xi - xm)).sum();
    x.iter().map(|&xi| 1.0 / n - xm * (xi - xm) / sxx).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn diagonal_matrix_all_norms() {
        let a = ComplexMatrix::from_real_rows([[-100.0, 0.0], [0.0, -200.0]]);
        for p in NormKind::ALL {
            assert_eq!(mu(&a, p).unwrap(), -100.0);
        }
    }

    #[test]
    fn nonnormal_drift_mu2() {
        for b in [-3.0, -1.0, 0.0, 0.5, 2.0, 5.0] {
            let a = ComplexMatrix::from_real_rows([[-1.0, b], [0.0, -1.0]]);
            let expect = f64::max(b / 2.0 - 1.0, -(b / 2.0 + 1.0));
            assert!((mu(&a, NormKind::Two).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn pendulum_drift_mu2() {
        let a = ComplexMatrix::from_real_rows([[0.0, 1.0], [10.0, 0.0]]);
        assert!((mu(&a, NormKind::Two).unwrap() - 5.5).abs() < 1e-14);
    }

    #[test]
    fn complex_entries_use_real_diagonal_and_modulus() {
        let a = ComplexMatrix::from_rows([
            [Complex64::new(-1.0, 5.0), Complex64::new(0.0, 3.0)],
            [Complex64::new(4.0, 0.0), Complex64::new(-10.0, -2.0)],
        ]);
        assert_eq!(mu(&a, NormKind::One).unwrap(), 3.0);
        assert_eq!(mu(&a, NormKind::Inf).unwrap(), 2.0);
    }

    #[test]
    fn limit_check_trivial_cases() {
        let h = [1e-3, 5e-4, 2.5e-4];
        for p in NormKind::ALL {
            assert!(mu_limit_check(&ComplexMatrix::zeros(3), p, &h).unwrap().abs() < 1e-12);
            let s = ComplexMatrix::from_real_rows([[-3.0]]);
            assert!((mu_limit_check(&s, p, &h).unwrap() + 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn limit_check_validates_steps() {
        let a = ComplexMatrix::identity(2);
        assert!(mu_limit_check(&a, NormKind::Two, &[1e-3]).is_err());
        assert!(mu_limit_check(&a, NormKind::Two, &[1e-3, 1e-2]).is_err());
        assert!(mu_limit_check(&a, NormKind::Two, &[1e-3, 1e-11]).is_err());
    }

    #[test]
    fn intercept_weights_reproduce_fit() {
        let x = [0.4, 0.2, 0.1, 0.05];
        let y = [3.0, 2.1, 1.4, 1.3];
        let w = intercept_weights(&x);
        let via_w: f64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((via_w - linear_fit(&x, &y).intercept).abs() < 1e-12);
    }
}
