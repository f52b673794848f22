use super::levy::{iterated_integral_sampler, IteratedIntegrals};
use super::{validate_l, Estimator, Extrapolation, NuEstimate};
use crate::error::{Error, Result};
use crate::lognorm::{intercept_weights, linear_fit, mu_square};
use crate::matrix::ComplexMatrix;
use crate::mc::{reduce, substream, McConfig};
use crate::norm::NormKind;
use crate::system::SdeSystem;

pub const DEFAULT_H_STEPS: usize = 7;

/// Largest admissible h·‖A‖_p.
const EXPANSION_LIMIT: f64 = 0.1;

/// h_k = h₀·2⁻ᵏ for k = 0..steps with h₀ = 0.05 / max(1, ‖A‖_p) unless
/// given.
pub fn default_h_seq(sys: &SdeSystem, p: NormKind, h0: Option<f64>, steps: usize) -> Vec<f64> {
    let h0 = h0.unwrap_or_else(|| 0.05 / sys.drift().norm(p).max(1.0));
    (0..steps).map(|k| h0 * 0.5f64.powi(k as i32)).collect()
}

fn validate_h_seq(sys: &SdeSystem, p: NormKind, h_seq: &[f64]) -> Result<()> {
    if h_seq.len() < 2 {
        return Err(Error::arg("need at least two step sizes to extrapolate"));
    }
    if h_seq.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::arg("step sizes must be positive and finite"));
    }
    if h_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::arg("step sizes must be strictly decreasing"));
    }
    let a_norm = sys.drift().norm(p);
    if h_seq[0] * a_norm >= EXPANSION_LIMIT {
        return Err(Error::arg(format!(
            "h = {} gives h·‖A‖ = {:.3} >= {EXPANSION_LIMIT}; use smaller steps",
            h_seq[0],
            h_seq[0] * a_norm
        )));
    }
    Ok(())
}

/// One-step matrix I + hA + Σⱼ B⁽ʲ⁾ΔW⁽ʲ⁾ + Σᵢⱼ B⁽ⁱ⁾B⁽ʲ⁾ I₍ᵢ,ⱼ₎.
struct StepMatrix<'a> {
    drift: &'a ComplexMatrix,
    diffusions: &'a [ComplexMatrix],
    /// B⁽ⁱ⁾B⁽ʲ⁾, row-major over (i, j)
    products: Vec<ComplexMatrix>,
}

impl<'a> StepMatrix<'a> {
    fn new(sys: &'a SdeSystem) -> Self {
        let b = sys.diffusions();
        let products = b.iter().flat_map(|bi| b.iter().map(move |bj| bi * bj)).collect();
        Self {
            drift: sys.drift(),
            diffusions: b,
            products,
        }
    }

    fn build(&self, h: f64, noise: &IteratedIntegrals) -> ComplexMatrix {
        let n = self.drift.rows();
        let m = self.diffusions.len();
        let mut out = self.drift.scale(h);
        for i in 0..n {
            out[(i, i)].re += 1.0;
        }
        for (b, &w) in self.diffusions.iter().zip(&noise.dw) {
            out.add_scaled(w, b);
        }
        for i in 0..m {
            for j in 0..m {
                out.add_scaled(noise.get(i, j), &self.products[i * m + j]);
            }
        }
        out
    }
}

fn growth_quotient(step: &ComplexMatrix, p: NormKind, l: u32, h: f64) -> f64 {
    let powered = match p {
        // ‖M‖₂^l = λ_max(MᴴM)^(l/2)
        NormKind::Two => {
            let gram = step.adjoint().matmul(step).expect("square");
            crate::eigen::lambda_max_trusted(&gram)
                .max(0.0)
                .powf(0.5 * f64::from(l))
        }
        _ => step.norm(p).powi(l as i32),
    };
    (powered - 1.0) / h
}

/// ν_p^l from the one-step growth quotient, extrapolated linearly to h = 0.
///
/// All step sizes share the same Brownian draw (sampled on a unit step and
/// rescaled), so each sample yields its own extrapolated intercept; the
/// Monte Carlo error of that intercept already accounts for the
/// correlation between step sizes. The reported standard error adds the
/// fit-residual uncertainty in quadrature.
/// max over channels of μ_p(B) + μ_p(−B), and whether it is nonzero
/// beyond rounding.
fn noise_spread(sys: &SdeSystem, p: NormKind) -> (f64, bool) {
    let mut spread = 0.0f64;
    let mut scale = 1.0f64;
    for b in sys.diffusions() {
        spread = spread.max(mu_square(b, p) + mu_square(&-b, p));
        scale = scale.max(b.max_abs());
    }
    (spread, spread > 1e-12 * scale)
}

pub fn nu_definitional(sys: &SdeSystem, p: NormKind, l: u32, h_seq: &[f64], cfg: &McConfig) -> Result<NuEstimate> {
    validate_l(l)?;
    cfg.validate()?;
    validate_h_seq(sys, p, h_seq)?;

    let k = h_seq.len();
    let weights = intercept_weights(h_seq);
    let step = StepMatrix::new(sys);
    let m = sys.channels();

    let (quotients, mc_err, samples) = if m == 0 {
        let zero = IteratedIntegrals {
            dw: Vec::new(),
            integrals: Vec::new(),
        };
        let q: Vec<f64> = h_seq
            .iter()
            .map(|&h| growth_quotient(&step.build(h, &zero), p, l, h))
            .collect();
        (q, 0.0, cfg.samples)
    } else {
        let moments = reduce(cfg.samples, k + 1, cfg.workers, |i, out| {
            let unit = iterated_integral_sampler(m, 1.0, &mut substream(cfg.seed, i));
            let mirror = cfg.antithetic.then(|| unit.reflected());
            for (slot, &h) in out.iter_mut().zip(h_seq) {
                let mut q = growth_quotient(&step.build(h, &unit.rescaled(h)), p, l, h);
                if let Some(mirror) = &mirror {
                    q = 0.5 * (q + growth_quotient(&step.build(h, &mirror.rescaled(h)), p, l, h));
                }
                *slot = q;
            }
            out[k] = weights.iter().zip(&out[..k]).map(|(w, q)| w * q).sum();
            Ok(())
        })?;
        let q = moments.mean[..k].to_vec();
        (q, moments.std_error[k], moments.samples)
    };

    let fit = linear_fit(h_seq, &quotients);
    let residual_error = if k > 2 {
        let rss: f64 = h_seq
            .iter()
            .zip(&quotients)
            .map(|(&h, &q)| (q - fit.intercept - fit.slope * h).powi(2))
            .sum();
        let s2 = rss / (k - 2) as f64;
        (s2 * weights.iter().map(|w| w * w).sum::<f64>()).sqrt()
    } else {
        0.0
    };
    let bias_warning = residual_error > 10.0 * mc_err && residual_error > 1e-12 * fit.intercept.abs().max(1.0);
    let (spread, divergent) = noise_spread(sys, p);

    Ok(NuEstimate {
        value: fit.intercept,
        std_error: mc_err.hypot(residual_error),
        samples,
        estimator: Estimator::Definitional,
        p,
        l,
        h_used: Some(h_seq.to_vec()),
        extrapolation: Some(Extrapolation {
            quotients,
            slope: fit.slope,
            mc_std_error: mc_err,
            residual_error,
            bias_warning,
            noise_spread: spread,
            divergent,
        }),
    })
}
