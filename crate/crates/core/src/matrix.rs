//! Dense complex matrices and the induced 1, 2 and ∞ norms.
//!
//! Storage is row-major `Complex64`. Matrices are small (desk scale, a few
//! hundred rows at most) so everything here is plain loops without blocking.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::norm::NormKind;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Square matrix from real rows; panics on ragged input. Meant for
    /// constants and tests.
    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(N, N, data).expect("finite constant matrix")
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(N, N, data).expect("finite constant matrix")
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn scalar(z: Complex64) -> Self {
        Self::from_diag(&[z])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        self.ensure_square()?;
        Ok(self.rows)
    }

    pub(crate) fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == if i == j { ONE } else { ZERO }))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Conjugate transpose M^H.
    pub fn adjoint(&self) -> Self {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self[(i, j)].conj());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data: out,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `self += s * other`, shapes must agree.
    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * s;
        }
    }

    /// Checked product; errors when inner dimensions disagree.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    pub fn square(&self) -> Result<Self> {
        self.matmul(self)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(self.apply_unchecked(x))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hermitian part (M + M^H)/2, built so the result is exactly Hermitian.
    pub fn hermitian_part(&self) -> Result<Self> {
        let n = self.dim()?;
        let mut h = Self::zeros(n);
        for i in 0..n {
            h[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        Ok(h)
    }

    /// Largest deviation from Hermitian symmetry, max |h_ij - conj(h_ji)|.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.rows.min(self.cols);
        let mut dev = 0.0f64;
        for i in 0..n {
            dev = dev.max(self[(i, i)].im.abs());
            for j in (i + 1)..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Induced matrix norm. The 2-norm is √λ_max(M^H M).
    pub fn norm(&self, p: NormKind) -> f64 {
        match p {
            NormKind::One => (0..self.cols)
                .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max),
            NormKind::Inf => (0..self.rows)
                .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max),
            NormKind::Two => {
                let gram = self.adjoint().matmul(self).expect("M^H M is square");
                eigen::lambda_max_trusted(&gram).max(0.0).sqrt()
            }
        }
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Result<Complex64> {
        let n = self.dim()?;
        let mut lu = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let (piv, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return Ok(ZERO);
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = lu[k * n + k];
            det *= d;
            for i in (k + 1)..n {
                let f = lu[i * n + k] / d;
                for j in (k + 1)..n {
                    let t = lu[k * n + j];
                    lu[i * n + j] -= f * t;
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Vector p-norm.
pub fn vector_norm(x: &[Complex64], p: NormKind) -> f64 {
    match p {
        NormKind::One => x.iter().map(|z| z.norm()).sum(),
        NormKind::Two => {
            // scaled to avoid overflow of the squares
            let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if scale == 0.0 || !scale.is_finite() {
                return scale;
            }
            scale * x.iter().map(|z| (z / scale).norm_sqr()).sum::<f64>().sqrt()
        }
        NormKind::Inf => x.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ONE; 3]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![ONE, c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(ComplexMatrix::new(0, 0, vec![]).is_err());
    }

    #[test]
    fn hermitian_part_of_nilpotent() {
        let m = ComplexMatrix::from_real_rows([[0.0, 2.0], [0.0, 0.0]]);
        assert_eq!(
            m.hermitian_part().unwrap(),
            ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
        );
    }

    #[test]
    fn hermitian_part_fixed_point_and_imaginary_scalar() {
        let h = ComplexMatrix::from_rows([[c(2.0, 0.0), c(1.0, -3.0)], [c(1.0, 3.0), c(-1.0, 0.0)]]);
        assert_eq!(h.hermitian_part().unwrap(), h);
        let i = ComplexMatrix::scalar(c(0.0, 1.0));
        assert_eq!(i.hermitian_part().unwrap(), ComplexMatrix::zeros(1));
    }

    #[test]
    fn hermitian_part_rejects_rectangular() {
        let m = ComplexMatrix::from_real(1, 2, &[1.0, 2.0]).unwrap();
        assert!(matches!(m.hermitian_part(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn matrix_norm_examples() {
        for p in NormKind::ALL {
            assert!((ComplexMatrix::identity(4).norm(p) - 1.0).abs() < 1e-14);
        }
        let b = ComplexMatrix::from_real_rows([[0.0, 2.0], [2.0, 0.0]]);
        assert!((b.norm(NormKind::Two) - 2.0).abs() < 1e-14);
        let m = ComplexMatrix::from_real_rows([[1.0, -2.0], [3.0, 4.0]]);
        assert_eq!(m.norm(NormKind::One), 6.0);
        assert_eq!(m.norm(NormKind::Inf), 7.0);
    }

    #[test]
    fn vector_norm_examples() {
        assert_eq!(vector_norm(&[c(3.0, 0.0), c(4.0, 0.0)], NormKind::Two), 5.0);
        assert_eq!(
            vector_norm(&[c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)], NormKind::One),
            3.0
        );
        assert_eq!(
            vector_norm(&[c(1.0, 0.0), c(-7.0, 0.0), c(2.0, 0.0)], NormKind::Inf),
            7.0
        );
        assert_eq!(vector_norm(&[c(0.0, 3.0), c(0.0, 4.0)], NormKind::Two), 5.0);
    }

    #[test]
    fn determinant_small() {
        let m = ComplexMatrix::from_real_rows([[1.0, 2.0], [3.0, 4.0]]);
        assert!((m.determinant().unwrap() - c(-2.0, 0.0)).norm() < 1e-14);
        let p = ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
        assert!((p.determinant().unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn products_and_adjoint() {
        let a = ComplexMatrix::from_rows([[c(1.0, 1.0), c(0.0, 2.0)], [c(3.0, 0.0), c(0.0, 0.0)]]);
        let ah = a.adjoint();
        assert_eq!(ah[(0, 1)], c(3.0, 0.0));
        assert_eq!(ah[(1, 0)], c(0.0, -2.0));
        let prod = &a * &ComplexMatrix::identity(2);
        assert_eq!(prod, a);
        assert!(a.matmul(&ComplexMatrix::identity(3)).is_err());
        assert_eq!(a.apply(&[ONE, ONE]).unwrap(), vec![c(1.0, 3.0), c(3.0, 0.0)]);
    }
}
