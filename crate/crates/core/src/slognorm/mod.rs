//! The stochastic logarithmic norm ν_p^l of a linear SDE.
//!
//! Two estimators are provided and deliberately kept separate:
//!
//! * [`nu_direct`] averages l·μ_p(A − ½ΣB² + ΣBζ) over standard normal ζ.
//! * [`nu_definitional`] estimates the one-step growth quotient
//!   (E‖I + hA + ΣBΔW + ΣBBI‖_p^l − 1)/h on a ladder of step sizes and
//!   extrapolates to h = 0.
//!
//! The two do not agree in general (B = I is the simplest example), and
//! reports show both.

mod bounds;
mod criteria;
mod definitional;
mod direct;
mod levy;
mod pseudo;
mod scaling;

use serde::Serialize;

pub use bounds::{bounds_report, Bound, BoundsReport};
pub use criteria::{scalar_stability, twobytwo_inf_ms_stable};
pub use definitional::{default_h_seq, nu_definitional, DEFAULT_H_STEPS};
pub use direct::nu_direct;
pub use levy::{iterated_integral_sampler, IteratedIntegrals, LEVY_SUBINTERVALS};
pub use pseudo::{expected_max_re_perturbed, PseudospectrumCheck};
pub use scaling::{scaling_check, ScalingReport};

use crate::norm::NormKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Direct,
    Definitional,
}

/// Details of the h → 0 extrapolation behind a definitional estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    /// Mean growth quotient at each step size.
    pub quotients: Vec<f64>,
    pub slope: f64,
    pub mc_std_error: f64,
    /// Intercept uncertainty implied by the residuals of the linear fit.
    pub residual_error: f64,
    /// Set when the residual error exceeds ten times the Monte Carlo error.
    pub bias_warning: bool,
    /// max over channels of μ_p(Bⱼ) + μ_p(−Bⱼ). When positive the quotient
    /// carries a term proportional to E|ΔW|/h, so it grows like h^(−1/2)
    /// and the h → 0 limit is +∞.
    pub noise_spread: f64,
    pub divergent: bool,
}

/// A Monte Carlo estimate of ν_p^l.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub estimator: Estimator,
    pub p: NormKind,
    pub l: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_used: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolation: Option<Extrapolation>,
}

impl NuEstimate {
    /// True when the two estimates differ by more than `k` combined
    /// standard errors.
    pub fn disagrees_with(&self, other: &NuEstimate, k: f64) -> bool {
        let sigma = self.std_error.hypot(other.std_error);
        (self.value - other.value).abs() > k * sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    AsymptoticallyStable,
    Stable,
    Unstable,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::AsymptoticallyStable => "asymptotically stable",
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        })
    }
}

/// Stability verdict for an estimate with cut-off `tol ≥ 0`.
///
/// The band |ν| ≤ 2σ + tol counts as the stable boundary.
pub fn classify(nu: &NuEstimate, tol: f64) -> Stability {
    classify_value(nu.value, nu.std_error, tol)
}

pub fn classify_value(value: f64, std_error: f64, tol: f64) -> Stability {
    let band = 2.0 * std_error + tol;
    if value + 2.0 * std_error < -tol {
        Stability::AsymptoticallyStable
    } else if value.abs() <= band {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

pub(crate) fn validate_l(l: u32) -> crate::error::Result<()> {
    if l == 0 {
        return Err(crate::error::Error::arg("moment order l must be a positive integer"));
    }
    Ok(())
}
