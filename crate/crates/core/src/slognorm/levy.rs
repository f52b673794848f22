//! Wiener increments and double Itô integrals over one step.

use rand::Rng;
use rand_distr::StandardNormal;

/// Subintervals used to approximate the off-diagonal double integrals.
pub const LEVY_SUBINTERVALS: usize = 32;

/// Increments ΔW⁽ʲ⁾ over [0, h] and the double integrals
/// I₍ᵢ,ⱼ₎ = ∫₀ʰ∫₀ˢ dW⁽ⁱ⁾ᵤ dW⁽ʲ⁾ₛ stored row-major (i, j).
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedIntegrals {
    pub dw: Vec<f64>,
    pub integrals: Vec<f64>,
}

impl IteratedIntegrals {
    pub fn channels(&self) -> usize {
        self.dw.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.integrals[i * self.dw.len() + j]
    }

    /// Same draw observed over a step of length `h` when `self` was sampled
    /// with unit step: increments scale by √h, double integrals by h.
    pub fn rescaled(&self, h: f64) -> IteratedIntegrals {
        let root = h.sqrt();
        IteratedIntegrals {
            dw: self.dw.iter().map(|w| w * root).collect(),
            integrals: self.integrals.iter().map(|x| x * h).collect(),
        }
    }

    /// Path reflection W → −W: increments flip sign, double integrals are
    /// unchanged.
    pub fn reflected(&self) -> IteratedIntegrals {
        IteratedIntegrals {
            dw: self.dw.iter().map(|w| -w).collect(),
            integrals: self.integrals.clone(),
        }
    }
}

/// Samples one step of an m-channel Wiener process with its double
/// integrals.
///
/// Diagonal entries use the exact identity I₍ⱼ,ⱼ₎ = ((ΔW⁽ʲ⁾)² − h)/2. For
/// i < j the integral is accumulated on `LEVY_SUBINTERVALS` left-point
/// subintervals, and I₍ⱼ,ᵢ₎ is set from I₍ᵢ,ⱼ₎ + I₍ⱼ,ᵢ₎ = ΔW⁽ⁱ⁾ΔW⁽ʲ⁾.
/// A single channel draws exactly one normal.
pub fn iterated_integral_sampler<R: Rng + ?Sized>(m: usize, h: f64, rng: &mut R) -> IteratedIntegrals {
    assert!(m >= 1, "at least one channel");
    assert!(h > 0.0, "step must be positive");
    let mut integrals = vec![0.0; m * m];
    if m == 1 {
        let w = h.sqrt() * rng.sample::<f64, _>(StandardNormal);
        integrals[0] = 0.5 * (w * w - h);
        return IteratedIntegrals { dw: vec![w], integrals };
    }

    let k = LEVY_SUBINTERVALS;
    let sub = (h / k as f64).sqrt();
    let mut path = vec![0.0; m];
    for _ in 0..k {
        let inc: Vec<f64> = (0..m).map(|_| sub * rng.sample::<f64, _>(StandardNormal)).collect();
        for i in 0..m {
            for j in (i + 1)..m {
                integrals[i * m + j] += path[i] * inc[j];
            }
        }
        for i in 0..m {
            path[i] += inc[i];
        }
    }
    for i in 0..m {
        integrals[i * m + i] = 0.5 * (path[i] * path[i] - h);
        for j in (i + 1)..m {
            integrals[j * m + i] = path[i] * path[j] - integrals[i * m + j];
        }
    }
    IteratedIntegrals { dw: path, integrals }
}
