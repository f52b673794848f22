use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Coefficients of the linear Itô SDE dX = AX dt + Σⱼ B⁽ʲ⁾X dW⁽ʲ⁾.
///
/// No diffusion matrices means a deterministic ODE.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdeSystem {
    drift: ComplexMatrix,
    diffusions: Vec<ComplexMatrix>,
}

impl SdeSystem {
    pub fn new(drift: ComplexMatrix, diffusions: Vec<ComplexMatrix>) -> Result<Self> {
        let n = drift.dim()?;
        for (j, b) in diffusions.iter().enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::Dimension(format!(
                    "diffusion B[{j}] is {}x{}, drift is {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(Self { drift, diffusions })
    }

    pub fn single(drift: ComplexMatrix, diffusion: ComplexMatrix) -> Result<Self> {
        Self::new(drift, vec![diffusion])
    }

    pub fn deterministic(drift: ComplexMatrix) -> Result<Self> {
        Self::new(drift, Vec::new())
    }

    pub fn drift(&self) -> &ComplexMatrix {
        &self.drift
    }

    pub fn diffusions(&self) -> &[ComplexMatrix] {
        &self.diffusions
    }

    pub fn dim(&self) -> usize {
        self.drift.rows()
    }

    /// Number of noise channels m.
    pub fn channels(&self) -> usize {
        self.diffusions.len()
    }

    /// A − ½ Σⱼ (B⁽ʲ⁾)².
    pub fn ito_drift(&self) -> ComplexMatrix {
        let mut c = self.drift.clone();
        for b in &self.diffusions {
            c.add_scaled(-0.5, &(b * b));
        }
        c
    }

    /// (αA, √α B⁽¹⁾, …, √α B⁽ᵐ⁾).
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::arg(format!("scale factor must be positive, got {alpha}")));
        }
        let root = alpha.sqrt();
        Ok(Self {
            drift: self.drift.scale(alpha),
            diffusions: self.diffusions.iter().map(|b| b.scale(root)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_diffusion() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(matches!(SdeSystem::single(a, b), Err(Error::Dimension(_))));
        let rect = ComplexMatrix::from_real(1, 2, &[1.0, 2.0]).unwrap();
        assert!(SdeSystem::deterministic(rect).is_err());
    }

    #[test]
    fn ito_drift_scalar() {
        let sys = SdeSystem::single(
            ComplexMatrix::from_real_rows([[-100.0]]),
            ComplexMatrix::from_real_rows([[10.0]]),
        )
        .unwrap();
        assert_eq!(sys.ito_drift(), ComplexMatrix::from_real_rows([[-150.0]]));
        let s = sys.scaled(4.0).unwrap();
        assert_eq!(s.drift()[(0, 0)].re, -400.0);
        assert_eq!(s.diffusions()[0][(0, 0)].re, 20.0);
        assert!(sys.scaled(0.0).is_err());
    }
}
