use serde::Serialize;

use super::{default_h_seq, nu_definitional, NuEstimate, DEFAULT_H_STEPS};
use crate::error::{Error, Result};
use crate::mc::McConfig;
use crate::norm::NormKind;
use crate::system::SdeSystem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub alpha: f64,
    pub unscaled: NuEstimate,
    pub scaled: NuEstimate,
    /// ν(αA, √αB) − α·ν(A, B)
    pub difference: f64,
    /// √(σ_scaled² + α²σ_unscaled²)
    pub combined_std_error: f64,
    pub holds: bool,
}

/// Compares ν(αA, √αB) with α·ν(A, B) using the definitional estimator on
/// the same seed and step ladder.
///
/// Without an explicit ladder the default one is built for the larger of
/// the two drifts so both runs stay inside the expansion regime.
pub fn scaling_check(
    sys: &SdeSystem,
    alpha: f64,
    p: NormKind,
    l: u32,
    h_seq: Option<&[f64]>,
    cfg: &McConfig,
) -> Result<ScalingReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::arg(format!("scale factor must be positive, got {alpha}")));
    }
    let scaled_sys = sys.scaled(alpha)?;
    let h: Vec<f64> = match h_seq {
        Some(h) => h.to_vec(),
        None => {
            let larger = if alpha > 1.0 { &scaled_sys } else { sys };
            default_h_seq(larger, p, None, DEFAULT_H_STEPS)
        }
    };
    let unscaled = nu_definitional(sys, p, l, &h, cfg)?;
    let scaled = nu_definitional(&scaled_sys, p, l, &h, cfg)?;
    let difference = scaled.value - alpha * unscaled.value;
    let combined_std_error = scaled.std_error.hypot(alpha * unscaled.std_error);
    let floor = 1e-12 * scaled.value.abs().max(1.0);
    Ok(ScalingReport {
        alpha,
        holds: difference.abs() <= 3.0 * combined_std_error + floor,
        unscaled,
        scaled,
        difference,
        combined_std_error,
    })
}
