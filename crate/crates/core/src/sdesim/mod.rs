//! Ensemble simulation of dX = AX dt + Σⱼ B⁽ʲ⁾X dW⁽ʲ⁾.

mod ensemble;
mod stability;
mod step;
mod strong;

use serde::{Deserialize, Serialize};

pub use ensemble::{growth_rate, simulate_moments, write_csv, GrowthRate, MomentTrajectory, DIVERGENCE_THRESHOLD};
pub use stability::{em_2x2_ms_stable, milstein_ms_stable, milstein_r};
pub use step::{em_step, milstein_step};
pub use strong::{strong_order_study, StrongOrderReport};

use crate::error::{Error, Result};
use crate::norm::NormKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    EulerMaruyama,
    Milstein,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::EulerMaruyama => "euler_maruyama",
            Scheme::Milstein => "milstein",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "euler_maruyama" | "em" | "euler" => Ok(Scheme::EulerMaruyama),
            "milstein" => Ok(Scheme::Milstein),
            _ => Err(Error::arg(format!("unknown scheme '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub h: f64,
    pub t_end: f64,
    pub paths: u64,
    /// Number of equally spaced recording intervals; must divide the step
    /// count.
    pub checkpoints: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub p: NormKind,
    pub l: u32,
    /// Thread count. Results do not depend on it, so it is not serialized.
    #[serde(skip, default = "one")]
    pub workers: usize,
}

fn one() -> usize {
    1
}

impl SimConfig {
    pub fn new(h: f64, t_end: f64, paths: u64, checkpoints: usize, scheme: Scheme, seed: u64) -> Self {
        Self {
            h,
            t_end,
            paths,
            checkpoints,
            scheme,
            seed,
            p: NormKind::Two,
            l: 2,
            workers: 1,
        }
    }

    pub fn with_moment(mut self, p: NormKind, l: u32) -> Self {
        self.p = p;
        self.l = l;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Total number of steps t_end / h.
    pub fn steps(&self) -> Result<u64> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::arg(format!("step size must be positive, got {}", self.h)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::arg(format!("end time must be positive, got {}", self.t_end)));
        }
        let ratio = self.t_end / self.h;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps > u64::MAX as f64 {
            return Err(Error::arg(format!(
                "t_end / h = {ratio} is not a positive whole number of steps"
            )));
        }
        Ok(steps as u64)
    }

    pub fn validate(&self) -> Result<u64> {
        let steps = self.steps()?;
        if self.paths == 0 {
            return Err(Error::arg("need at least one path"));
        }
        if self.checkpoints == 0 || steps % self.checkpoints as u64 != 0 {
            return Err(Error::arg(format!(
                "checkpoints ({}) must be positive and divide the step count ({steps})",
                self.checkpoints
            )));
        }
        if self.l == 0 {
            return Err(Error::arg("moment order l must be a positive integer"));
        }
        if self.workers == 0 {
            return Err(Error::arg("worker count must be positive"));
        }
        Ok(steps)
    }
}
