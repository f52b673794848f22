use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::step::Stepper;
use super::{Scheme, SimConfig};
use crate::error::{Error, Result};
use crate::matrix::vector_norm;
use crate::mc::{reduce, substream};
use crate::slognorm::{iterated_integral_sampler, IteratedIntegrals};
use crate::system::SdeSystem;

/// A path whose state norm exceeds this is treated as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e150;

/// Estimated E‖X_t‖_p^l at equally spaced checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    /// +∞ from the first checkpoint at which any path diverged.
    pub moments: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub paths: u64,
    pub config: SimConfig,
    /// Time of the first checkpoint with a diverged path.
    pub diverged_at: Option<f64>,
}

impl MomentTrajectory {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }
}

fn draw_noise<R: Rng>(rng: &mut R, m: usize, h: f64, scheme: Scheme, noise: &mut IteratedIntegrals) {
    if m == 1 {
        let w = h.sqrt() * rng.sample::<f64, _>(StandardNormal);
        noise.dw[0] = w;
        noise.integrals[0] = 0.5 * (w * w - h);
    } else if scheme == Scheme::Milstein {
        *noise = iterated_integral_sampler(m, h, rng);
    } else {
        let root = h.sqrt();
        for w in noise.dw.iter_mut() {
            *w = root * rng.sample::<f64, _>(StandardNormal);
        }
    }
}

/// Simulates `cfg.paths` independent trajectories from `x0` and records the
/// sample mean and standard error of ‖X‖_p^l at each checkpoint.
///
/// Path `i` draws from its own substream, so the result is identical for
/// any worker count. Divergence is reported in the trajectory, not as an
/// error.
pub fn simulate_moments(sys: &SdeSystem, x0: &[Complex64], cfg: &SimConfig) -> Result<MomentTrajectory> {
    let steps = cfg.validate()?;
    if x0.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "initial state has length {}, system dimension is {}",
            x0.len(),
            sys.dim()
        )));
    }
    let x0_norm = vector_norm(x0, cfg.p);
    if !(x0_norm > 0.0 && x0_norm.is_finite()) {
        return Err(Error::arg("initial state must be nonzero and finite"));
    }

    let n = sys.dim();
    let m = sys.channels();
    let cp = cfg.checkpoints;
    let per_checkpoint = steps / cp as u64;
    let stepper = Stepper::new(sys);
    let l = cfg.l as i32;

    let moments = reduce(cfg.paths, 2 * (cp + 1), cfg.workers, |path, out| {
        let (values, flags) = out.split_at_mut(cp + 1);
        let mut rng = substream(cfg.seed, path);
        let mut x = x0.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        let mut noise = IteratedIntegrals {
            dw: vec![0.0; m],
            integrals: vec![0.0; m * m],
        };
        values[0] = x0_norm.powi(l);
        flags[0] = 0.0;
        let mut diverged = false;
        for k in 1..=cp {
            if !diverged {
                for _ in 0..per_checkpoint {
                    if m > 0 {
                        draw_noise(&mut rng, m, cfg.h, cfg.scheme, &mut noise);
                    }
                    match cfg.scheme {
                        Scheme::EulerMaruyama => stepper.euler(&x, &noise.dw, cfg.h, &mut next),
                        Scheme::Milstein => stepper.milstein(&x, &noise, cfg.h, &mut next),
                    }
                    std::mem::swap(&mut x, &mut next);
                }
                let norm = vector_norm(&x, cfg.p);
                diverged = !(norm <= DIVERGENCE_THRESHOLD);
                values[k] = if diverged { 0.0 } else { norm.powi(l) };
            } else {
                values[k] = 0.0;
            }
            flags[k] = if diverged { 1.0 } else { 0.0 };
            if values[k].is_infinite() {
                values[k] = 0.0;
                flags[k] = 1.0;
                diverged = true;
            }
        }
        Ok(())
    })?;

    let times: Vec<f64> = (0..=cp).map(|k| cfg.t_end * k as f64 / cp as f64).collect();
    let mut mean = moments.mean[..=cp].to_vec();
    let mut std_errors = moments.std_error[..=cp].to_vec();
    let first_diverged = (0..=cp).find(|&k| moments.mean[cp + 1 + k] > 0.0);
    if let Some(k0) = first_diverged {
        for k in k0..=cp {
            mean[k] = f64::INFINITY;
            std_errors[k] = f64::INFINITY;
        }
    }
    Ok(MomentTrajectory {
        diverged_at: first_diverged.map(|k| times[k]),
        times,
        moments: mean,
        std_errors,
        paths: moments.samples,
        config: *cfg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRate {
    pub rate: f64,
    pub std_error: f64,
    /// Leading checkpoints with finite positive moments used in the fit.
    pub points: usize,
}

/// Least-squares slope of log E‖X‖^l against time over the finite prefix.
///
/// The standard error propagates each checkpoint's relative error
/// σₖ/mₖ through the slope weights, treating checkpoints as independent.
pub fn growth_rate(traj: &MomentTrajectory) -> Result<GrowthRate> {
    let points = traj
        .moments
        .iter()
        .take_while(|&&v| v.is_finite() && v > 0.0)
        .count()
        .min(traj.times.len());
    if points < 3 {
        return Err(Error::TooFewPoints(points));
    }
    let t = &traj.times[..points];
    let tbar = t.iter().sum::<f64>() / points as f64;
    let sxx: f64 = t.iter().map(|x| (x - tbar).powi(2)).sum();
    let mut rate = 0.0;
    let mut var = 0.0;
    for k in 0..points {
        let w = (t[k] - tbar) / sxx;
        rate += w * traj.moments[k].ln();
        var += (w * traj.std_errors[k] / traj.moments[k]).powi(2);
    }
    Ok(GrowthRate {
        rate,
        std_error: var.sqrt(),
        points,
    })
}

/// Writes `time,moment,stderr,paths,scheme` rows.
pub fn write_csv<W: Write>(traj: &MomentTrajectory, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidArgument(format!("cannot write trajectory: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "moment", "stderr", "paths", "scheme"])
        .map_err(io)?;
    let paths = traj.paths.to_string();
    let scheme = traj.config.scheme.as_str();
    for k in 0..traj.times.len() {
        w.write_record([
            traj.times[k].to_string().as_str(),
            traj.moments[k].to_string().as_str(),
            traj.std_errors[k].to_string().as_str(),
            paths.as_str(),
            scheme,
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("cannot write trajectory: {e}")))
}
