use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::step::Stepper;
use crate::error::{Error, Result};
use crate::lognorm::linear_fit;
use crate::matrix::ComplexMatrix;
use crate::mc::{reduce, substream};
use crate::slognorm::IteratedIntegrals;
use crate::system::SdeSystem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongOrderReport {
    pub step_sizes: Vec<f64>,
    /// Mean absolute endpoint error against the exact solution.
    pub em_errors: Vec<f64>,
    pub milstein_errors: Vec<f64>,
    /// Slope of log error against log h.
    pub em_order: f64,
    pub milstein_order: f64,
    pub paths: u64,
}

/// Endpoint strong errors of both schemes on dX = αX dt + βX dW.
///
/// Each path draws one Brownian path on the finest grid h = T·2^-max and
/// coarsens it dyadically, so every step size sees the same path. The
/// exact endpoint is x₀·exp((α − β²/2)T + βW_T).
#[allow(clippy::too_many_arguments)]
pub fn strong_order_study(
    alpha: f64,
    beta: f64,
    x0: f64,
    t_end: f64,
    levels: RangeInclusive<u32>,
    paths: u64,
    seed: u64,
    workers: usize,
) -> Result<StrongOrderReport> {
    let (lo, hi) = (*levels.start(), *levels.end());
    if hi < lo + 1 || hi > 24 {
        return Err(Error::arg("need at least two refinement levels, at most 2^24 steps"));
    }
    if !(t_end > 0.0) || paths < 2 {
        return Err(Error::arg("need a positive horizon and at least two paths"));
    }
    let sys = SdeSystem::single(
        ComplexMatrix::from_real_rows([[alpha]]),
        ComplexMatrix::from_real_rows([[beta]]),
    )?;
    let stepper = Stepper::new(&sys);
    let fine = 1usize << hi;
    let dt = t_end / fine as f64;
    let count = (hi - lo + 1) as usize;

    let moments = reduce(paths, 2 * count, workers, |path, out| {
        let mut rng = substream(seed, path);
        let inc: Vec<f64> = (0..fine)
            .map(|_| dt.sqrt() * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let w_end: f64 = inc.iter().sum();
        let exact = x0 * ((alpha - 0.5 * beta * beta) * t_end + beta * w_end).exp();
        for (slot, level) in (lo..=hi).enumerate() {
            let block = fine >> level;
            let h = t_end / (1usize << level) as f64;
            let mut em = [Complex64::new(x0, 0.0)];
            let mut mil = em;
            let mut next = em;
            let mut noise = IteratedIntegrals {
                dw: vec![0.0],
                integrals: vec![0.0],
            };
            for chunk in inc.chunks(block) {
                let w: f64 = chunk.iter().sum();
                noise.dw[0] = w;
                noise.integrals[0] = 0.5 * (w * w - h);
                stepper.euler(&em, &noise.dw, h, &mut next);
                em = next;
                stepper.milstein(&mil, &noise, h, &mut next);
                mil = next;
            }
            out[slot] = (em[0].re - exact).abs();
            out[count + slot] = (mil[0].re - exact).abs();
        }
        Ok(())
    })?;

    let step_sizes: Vec<f64> = (lo..=hi).map(|k| t_end / (1u64 << k) as f64).collect();
    let em_errors = moments.mean[..count].to_vec();
    let milstein_errors = moments.mean[count..].to_vec();
    let log_h: Vec<f64> = step_sizes.iter().map(|h| h.ln()).collect();
    let order = |e: &[f64]| linear_fit(&log_h, &e.iter().map(|x| x.ln()).collect::<Vec<_>>()).slope;
    Ok(StrongOrderReport {
        em_order: order(&em_errors),
        milstein_order: order(&milstein_errors),
        step_sizes,
        em_errors,
        milstein_errors,
        paths: moments.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_errors_shrink_linearly() {
        let r = strong_order_study(-1.0, 0.0, 1.0, 1.0, 4..=8, 2, 0, 1).unwrap();
        assert!((r.em_order - 1.0).abs() < 0.1, "{}", r.em_order);
        assert_eq!(r.em_errors, r.milstein_errors);
    }

    #[test]
    fn rejects_single_level() {
        assert!(strong_order_study(-1.0, 1.0, 1.0, 1.0, 5..=5, 10, 0, 1).is_err());
    }
}
