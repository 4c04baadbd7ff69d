//! Monte Carlo summaries, residual norms and the parallel batch driver.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{config, domain, Result};
use crate::path::SamplePath;
use crate::rng::RngStream;
use crate::scalar::Real;

/// Sample mean with a normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub n_samples: usize,
    pub mean: f64,
    /// Sample standard deviation over `√n`.
    pub std_error: f64,
    pub confidence: f64,
    pub ci_halfwidth: f64,
    pub min: f64,
    pub max: f64,
}

impl McSummary {
    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn within_std_errors(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

pub fn mc_estimate(samples: &[f64], confidence: f64) -> Result<McSummary> {
    if samples.len() < 2 {
        return Err(domain(format!("need at least 2 samples, got {}", samples.len())));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(config(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    Ok(McSummary {
        n_samples: samples.len(),
        mean,
        std_error,
        confidence,
        ci_halfwidth: z * std_error,
        min,
        max,
    })
}

/// Sup-norm of `lhs − rhs`.
pub fn identity_residual<T: Real>(lhs: &SamplePath<T>, rhs: &SamplePath<T>) -> Result<T> {
    Ok(lhs.sub(rhs)?.sup_norm())
}

/// Fraction of paths strictly positive at time `t`.
pub fn sign_occupation<T: Real>(paths: &[SamplePath<T>], t: T, confidence: f64) -> Result<McSummary> {
    let indicators = paths
        .iter()
        .map(|p| {
            p.at(t)
                .map(|v| if v > T::zero() { 1.0 } else { 0.0 })
                .ok_or_else(|| domain(format!("time {t} is not on the grid")))
        })
        .collect::<Result<Vec<f64>>>()?;
    mc_estimate(&indicators, confidence)
}

/// Median, averaging the two central values for even lengths. NaNs sort last.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Runs one job per stream id on a fixed-size worker pool.
///
/// Job `k` always receives `RngStream::new(master_seed, first_stream + k)`
/// and results come back in job order, so output does not depend on the
/// number of workers.
pub struct BatchRunner {
    master_seed: u64,
    first_stream: u64,
    pool: ThreadPool,
}

impl BatchRunner {
    pub fn new(master_seed: u64, workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(config("worker count must be positive"));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| config(format!("cannot start worker pool: {e}")))?;
        Ok(Self {
            master_seed,
            first_stream: 0,
            pool,
        })
    }

    /// Offsets stream ids so that separate batches under one seed do not overlap.
    pub fn with_first_stream(mut self, first_stream: u64) -> Self {
        self.first_stream = first_stream;
        self
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn stream(&self, k: usize) -> RngStream {
        RngStream::new(self.master_seed, self.first_stream + k as u64)
    }

    pub fn run<R, F>(&self, jobs: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(RngStream) -> R + Sync,
    {
        self.pool
            .install(|| (0..jobs).into_par_iter().map(|k| job(self.stream(k))).collect())
    }

    /// Like [`run`](Self::run) but stops at the first error, reported in job order.
    pub fn try_run<R, E, F>(&self, jobs: usize, job: F) -> std::result::Result<Vec<R>, E>
    where
        R: Send,
        E: Send,
        F: Fn(RngStream) -> std::result::Result<R, E> + Sync,
    {
        self.run(jobs, job).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::make_grid;

    #[test]
    fn mc_examples() {
        let s = mc_estimate(&[1.0, 1.0, 1.0, 1.0], 0.95).unwrap();
        assert_eq!((s.mean, s.std_error, s.ci_halfwidth), (1.0, 0.0, 0.0));
        let s = mc_estimate(&[0.0, 2.0], 0.95).unwrap();
        assert_eq!((s.mean, s.std_error), (1.0, 1.0));
        assert!((s.ci_halfwidth - 1.959_963_984_540_054).abs() < 1e-9);
        assert_eq!((s.min, s.max), (0.0, 2.0));
        assert!(mc_estimate(&[1.0], 0.95).is_err());
        assert!(mc_estimate(&[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let g = make_grid(1.0_f64, 1).unwrap();
        let a = SamplePath::new(g, vec![0.0, 1.0]).unwrap();
        let b = SamplePath::new(g, vec![0.0, 0.0]).unwrap();
        assert_eq!(identity_residual(&a, &a).unwrap(), 0.0);
        assert_eq!(identity_residual(&a, &b).unwrap(), 1.0);
        assert_eq!(identity_residual(&b, &a).unwrap(), 1.0);
    }

    #[test]
    fn sign_occupation_examples() {
        let g = make_grid(1.0_f64, 2).unwrap();
        let paths = vec![SamplePath::new(g, vec![0.0, 1.0, 2.0]).unwrap(); 3];
        let s = sign_occupation(&paths, 1.0, 0.99).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!(sign_occupation(&paths, 0.3, 0.99).is_err());
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn batch_order_is_worker_independent() {
        use rand::Rng;
        let one = BatchRunner::new(9, 1).unwrap().run(50, |s| s.rng().random::<u64>());
        let four = BatchRunner::new(9, 4).unwrap().run(50, |s| s.rng().random::<u64>());
        assert_eq!(one, four);
        assert!(BatchRunner::new(9, 0).is_err());
        let r: std::result::Result<Vec<u64>, u64> =
            BatchRunner::new(1, 2).unwrap().try_run(10, |s| if s.stream_id == 3 { Err(3) } else { Ok(0) });
        assert_eq!(r, Err(3));
    }
}
