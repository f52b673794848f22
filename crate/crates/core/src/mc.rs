//! Reproducible Monte Carlo plumbing.
//!
//! Every sample owns an RNG substream derived from `(seed, index)`, and the
//! per-sample statistics are reduced in fixed-size chunks combined by a
//! pairwise tree keyed on chunk index. Neither step depends on how many
//! worker threads ran the chunks, so results are bit-identical for any
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per reduction chunk. Part of the reproducibility contract.
pub const CHUNK: u64 = 1024;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub antithetic: bool,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            antithetic: true,
            workers: 1,
        }
    }

    /// Default sample count by system dimension: 10⁶ up to n = 4, 10⁵ up
    /// to n = 16, 10⁴ above.
    pub fn default_samples(n: usize) -> u64 {
        match n {
            0..=4 => 1_000_000,
            5..=16 => 100_000,
            _ => 10_000,
        }
    }

    pub fn for_dimension(n: usize) -> Self {
        Self::new(Self::default_samples(n), DEFAULT_SEED)
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_antithetic(mut self, antithetic: bool) -> Self {
        self.antithetic = antithetic;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::arg("Monte Carlo needs at least 2 samples"));
        }
        if self.workers == 0 {
            return Err(Error::arg("worker count must be positive"));
        }
        Ok(())
    }
}

/// RNG substream for sample `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sample mean and standard error of a vector-valued per-sample statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMoments {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub samples: u64,
}

#[derive(Clone)]
struct Partial {
    count: u64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Partial {
    fn zero(width: usize) -> Self {
        Self {
            count: 0,
            sum: vec![0.0; width],
            sum_sq: vec![0.0; width],
        }
    }

    fn merge(mut self, other: &Partial) -> Self {
        self.count += other.count;
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self
    }
}

fn tree_merge(parts: &[Partial]) -> Partial {
    match parts.len() {
        1 => parts[0].clone(),
        n => {
            let (l, r) = parts.split_at(n / 2);
            tree_merge(l).merge(&tree_merge(r))
        }
    }
}

/// Runs `stat(index, out)` for every sample index in `0..samples` and
/// reduces each of the `width` outputs to a mean and standard error.
///
/// Sums are taken relative to the statistic of sample 0, so a statistic
/// that is identical on every sample comes back exactly with zero error.
/// The first failing sample (lowest index) is reported.
pub fn reduce<F>(samples: u64, width: usize, workers: usize, stat: F) -> Result<SampleMoments>
where
    F: Fn(u64, &mut [f64]) -> Result<()> + Sync,
{
    if samples == 0 {
        return Err(Error::arg("no samples to reduce"));
    }
    let mut shift = vec![0.0; width];
    stat(0, &mut shift).map_err(|e| wrap(0, e))?;

    let chunks = samples.div_ceil(CHUNK);
    let run_chunk = |c: u64| -> Result<Partial> {
        let mut part = Partial::zero(width);
        let mut buf = vec![0.0; width];
        let start = c * CHUNK;
        let end = (start + CHUNK).min(samples);
        for i in start..end {
            stat(i, &mut buf).map_err(|e| wrap(i, e))?;
            for k in 0..width {
                let d = buf[k] - shift[k];
                part.sum[k] += d;
                part.sum_sq[k] += d * d;
            }
            part.count += 1;
        }
        Ok(part)
    };

    let parts: Vec<Result<Partial>> = if workers <= 1 || chunks == 1 {
        (0..chunks).map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::arg(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect())
    };
    let parts: Vec<Partial> = parts.into_iter().collect::<Result<_>>()?;
    let total = tree_merge(&parts);

    let n = total.count as f64;
    let mut mean = Vec::with_capacity(width);
    let mut std_error = Vec::with_capacity(width);
    for k in 0..width {
        let s = total.sum[k];
        mean.push(shift[k] + s / n);
        let var = if total.count > 1 {
            ((total.sum_sq[k] - s * s / n) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        std_error.push((var / n).sqrt());
    }
    Ok(SampleMoments {
        mean,
        std_error,
        samples: total.count,
    })
}

fn wrap(index: u64, e: Error) -> Error {
    match e {
        Error::Sample { .. } => e,
        other => Error::Sample {
            index,
            source: Box::new(other),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_statistic_is_exact() {
        let m = reduce(5000, 1, 4, |_, out| {
            out[0] = -1.2345678901234;
            Ok(())
        })
        .unwrap();
        assert_eq!(m.mean[0], -1.2345678901234);
        assert_eq!(m.std_error[0], 0.0);
        assert_eq!(m.samples, 5000);
    }

    #[test]
    fn mean_and_error_of_known_sequence() {
        // 0, 1, ..., 9999: mean 4999.5, variance n(n+1)/12
        let m = reduce(10_000, 1, 3, |i, out| {
            out[0] = i as f64;
            Ok(())
        })
        .unwrap();
        assert!((m.mean[0] - 4999.5).abs() < 1e-9);
        let var = 10_000.0 * 10_001.0 / 12.0;
        assert!((m.std_error[0] - (var / 10_000.0f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let stat = |i: u64, out: &mut [f64]| {
            let mut rng = substream(7, i);
            out[0] = rng.random::<f64>();
            out[1] = out[0].sin() * 1e3;
            Ok(())
        };
        let a = reduce(20_000, 2, 1, stat).unwrap();
        let b = reduce(20_000, 2, 8, stat).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_by_index_wins() {
        let err = reduce(10_000, 1, 4, |i, out| {
            if i == 3000 || i == 9000 {
                return Err(Error::arg("boom"));
            }
            out[0] = 0.0;
            Ok(())
        })
        .unwrap_err();
        assert!(matches!(err, Error::Sample { index: 3000, .. }));
    }

    #[test]
    fn substreams_differ() {
        let a: u64 = substream(1, 0).random();
        let b: u64 = substream(1, 1).random();
        let c: u64 = substream(2, 0).random();
        assert!(a != b && a != c);
        assert_eq!(a, substream(1, 0).random::<u64>());
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(1, 0).validate().is_err());
        assert!(McConfig::new(2, 0).with_workers(0).validate().is_err());
        assert!(McConfig::new(2, 0).validate().is_ok());
        assert_eq!(McConfig::default_samples(2), 1_000_000);
        assert_eq!(McConfig::default_samples(6), 100_000);
        assert_eq!(McConfig::default_samples(100), 10_000);
    }
}
