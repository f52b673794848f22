//! One-step updates for Euler-Maruyama and Milstein.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::slognorm::IteratedIntegrals;
use crate::system::SdeSystem;

fn check_dims(sys: &SdeSystem, x: &[Complex64], dw: &[f64]) -> Result<()> {
    if x.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "state has length {}, system dimension is {}",
            x.len(),
            sys.dim()
        )));
    }
    if dw.len() != sys.channels() {
        return Err(Error::Dimension(format!(
            "{} Wiener increments for {} noise channels",
            dw.len(),
            sys.channels()
        )));
    }
    Ok(())
}

/// out += s·Mx
#[inline]
fn add_product(out: &mut [Complex64], m: &ComplexMatrix, x: &[Complex64], s: f64) {
    let n = x.len();
    let data = m.as_slice();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &data[i * n..(i + 1) * n];
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in row.iter().zip(x) {
            acc += a * b;
        }
        *o += acc * s;
    }
}

/// x + hAx + Σⱼ B⁽ʲ⁾x·ΔW⁽ʲ⁾
pub fn em_step(sys: &SdeSystem, x: &[Complex64], dw: &[f64], h: f64) -> Result<Vec<Complex64>> {
    check_dims(sys, x, dw)?;
    let mut out = x.to_vec();
    Stepper::new(sys).euler(x, dw, h, &mut out);
    Ok(out)
}

/// Euler-Maruyama plus Σᵢⱼ B⁽ʲ⁾B⁽ⁱ⁾x·I₍ᵢ,ⱼ₎, which for one channel is
/// ((ΔW)² − h)/2·B²x.
pub fn milstein_step(sys: &SdeSystem, x: &[Complex64], noise: &IteratedIntegrals, h: f64) -> Result<Vec<Complex64>> {
    check_dims(sys, x, &noise.dw)?;
    if noise.integrals.len() != noise.dw.len() * noise.dw.len() {
        return Err(Error::Dimension("iterated integral matrix has the wrong size".into()));
    }
    let mut out = x.to_vec();
    Stepper::new(sys).milstein(x, noise, h, &mut out);
    Ok(out)
}

/// Allocation-free stepping with the second-order products precomputed.
pub(crate) struct Stepper<'a> {
    drift: &'a ComplexMatrix,
    diffusions: &'a [ComplexMatrix],
    /// B⁽ʲ⁾B⁽ⁱ⁾ at index (i, j)
    products: Vec<ComplexMatrix>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(sys: &'a SdeSystem) -> Self {
        let b = sys.diffusions();
        let products = b.iter().flat_map(|bi| b.iter().map(move |bj| bj * bi)).collect();
        Self {
            drift: sys.drift(),
            diffusions: b,
            products,
        }
    }

    /// Writes the Euler-Maruyama update of `x` into `out`.
    pub(crate) fn euler(&self, x: &[Complex64], dw: &[f64], h: f64, out: &mut [Complex64]) {
        out.copy_from_slice(x);
        add_product(out, self.drift, x, h);
        for (b, &w) in self.diffusions.iter().zip(dw) {
            add_product(out, b, x, w);
        }
    }

    pub(crate) fn milstein(&self, x: &[Complex64], noise: &IteratedIntegrals, h: f64, out: &mut [Complex64]) {
        self.euler(x, &noise.dw, h, out);
        let m = self.diffusions.len();
        for i in 0..m {
            for j in 0..m {
                add_product(out, &self.products[i * m + j], x, noise.get(i, j));
            }
        }
    }
}
