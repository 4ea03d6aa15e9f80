//! Streaming moments and the sharded Monte Carlo driver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel;
use crate::rng::{derive_substream, RandomStream};

/// Samples per shard. Shard boundaries are fixed so the reduction order never
/// depends on the worker count.
pub const CHUNK_SIZE: u64 = 512;
/// Number of largest observations tracked for the heavy-tail guard.
pub const TOP_K: usize = 10;

/// Welford moments plus extremes and the `TOP_K` largest values.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    sum: f64,
    min: f64,
    max: f64,
    top: Vec<f64>,
}

impl Default for Moments {
    fn default() -> Self {
        Self {
            n: 0,
            mean: 0.0,
            m2: 0.0,
            sum: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            top: Vec::with_capacity(TOP_K),
        }
    }
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        self.sum += x;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
        if self.top.len() < TOP_K {
            self.top.push(x);
            self.top.sort_by(|a, b| b.total_cmp(a));
        } else if x > self.top[TOP_K - 1] {
            self.top[TOP_K - 1] = x;
            self.top.sort_by(|a, b| b.total_cmp(a));
        }
    }

    /// Chan et al. parallel combination.
    pub fn merge(&self, other: &Self) -> Self {
        if other.n == 0 {
            return self.clone();
        }
        if self.n == 0 {
            return other.clone();
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (other.n as f64 / n as f64);
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        let mut top: Vec<f64> = self.top.iter().chain(&other.top).copied().collect();
        top.sort_by(|a, b| b.total_cmp(a));
        top.truncate(TOP_K);
        Self {
            n,
            mean,
            m2,
            sum: self.sum + other.sum,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
            top,
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n > 1 {
            (self.variance() / self.n as f64).sqrt()
        } else {
            0.0
        }
    }

    /// Fraction of the (positive) sum carried by the `TOP_K` largest samples.
    pub fn tail_share(&self) -> f64 {
        if self.sum > 0.0 {
            (self.top.iter().sum::<f64>() / self.sum).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn estimate(&self, seed: u64) -> MCEstimate {
        MCEstimate {
            mean: self.mean,
            std_error: self.std_error(),
            n: self.n,
            seed,
            min: self.min,
            max: self.max,
            tail_share: self.tail_share(),
        }
    }
}

/// Joint moments of two statistics computed on the same samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairMoments {
    pub first: Moments,
    pub second: Moments,
    comoment: f64,
}

impl PairMoments {
    pub fn push(&mut self, x: f64, y: f64) {
        let dx = x - self.first.mean;
        self.first.push(x);
        self.second.push(y);
        // Pre-update x mean, post-update y mean.
        self.comoment += dx * (y - self.second.mean);
    }

    pub fn merge(&self, other: &Self) -> Self {
        let (na, nb) = (self.first.n as f64, other.first.n as f64);
        let n = na + nb;
        let comoment = if na == 0.0 {
            other.comoment
        } else if nb == 0.0 {
            self.comoment
        } else {
            let dx = other.first.mean - self.first.mean;
            let dy = other.second.mean - self.second.mean;
            self.comoment + other.comoment + dx * dy * na * nb / n
        };
        Self { first: self.first.merge(&other.first), second: self.second.merge(&other.second), comoment }
    }

    /// Covariance between the two sample means.
    pub fn mean_covariance(&self) -> f64 {
        let n = self.first.n as f64;
        if n > 1.0 {
            self.comoment / (n - 1.0) / n
        } else {
            0.0
        }
    }
}

/// Result of a Monte Carlo mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
    pub min: f64,
    pub max: f64,
    /// Share of the sum carried by the ten largest samples.
    pub tail_share: f64,
}

impl MCEstimate {
    /// A value known in closed form, reported with zero error.
    pub fn exact(value: f64, n: u64, seed: u64) -> Self {
        Self { mean: value, std_error: 0.0, n, seed, min: value, max: value, tail_share: 0.0 }
    }

    pub fn relative_error(&self) -> f64 {
        if self.mean != 0.0 {
            self.std_error / self.mean.abs()
        } else {
            f64::INFINITY
        }
    }

    /// Multiplies the estimate (and its spread) by a constant factor.
    pub fn scaled(&self, factor: f64) -> Self {
        let (a, b) = (self.min * factor, self.max * factor);
        Self {
            mean: self.mean * factor,
            std_error: self.std_error * factor.abs(),
            min: a.min(b),
            max: a.max(b),
            ..*self
        }
    }
}

/// Sample count, root seed and worker hint for one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: u64,
    pub seed: u64,
    /// Thread count; `None` uses the ambient pool. Ignored without the
    /// `parallel` feature.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(n: u64, seed: u64) -> Self {
        Self { n, seed, workers: None }
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("Monte Carlo needs n >= 2, got {n}")));
    }
    Ok(())
}

fn finite(x: f64, index: u64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("non-finite statistic {x} at sample {index}")))
    }
}

/// Runs `chunk(start, end)` over fixed shards of `0..n` and reduces the
/// shard accumulators pairwise in shard order.
pub fn sharded<A, F, M>(n: u64, workers: Option<usize>, chunk: F, merge: M) -> Result<A>
where
    A: Send + Default,
    F: Fn(u64, u64) -> Result<A> + Sync + Send,
    M: Fn(&A, &A) -> A,
{
    let shards = n.div_ceil(CHUNK_SIZE);
    let results = parallel::map_indices(shards, workers, |s| {
        let start = s * CHUNK_SIZE;
        chunk(start, (start + CHUNK_SIZE).min(n))
    })?;
    let mut level: Vec<A> = results.into_iter().collect::<Result<Vec<A>>>()?;
    if level.is_empty() {
        return Ok(A::default());
    }
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(&a, &b)),
                None => next.push(a),
            }
        }
        level = next;
    }
    Ok(level.pop().expect("non-empty"))
}

/// Mean of `statistic` over samples `0..n`, sample `i` drawing from
/// `derive_substream(seed, i)`.
pub fn mc_mean<F>(cfg: McConfig, statistic: F) -> Result<MCEstimate>
where
    F: Fn(u64, &mut RandomStream) -> Result<f64> + Sync + Send,
{
    Ok(mc_moments(cfg, statistic)?.estimate(cfg.seed))
}

pub fn mc_moments<F>(cfg: McConfig, statistic: F) -> Result<Moments>
where
    F: Fn(u64, &mut RandomStream) -> Result<f64> + Sync + Send,
{
    check_n(cfg.n)?;
    sharded(
        cfg.n,
        cfg.workers,
        |start, end| {
            let mut acc = Moments::new();
            for i in start..end {
                let mut stream = derive_substream(cfg.seed, i);
                acc.push(finite(statistic(i, &mut stream)?, i)?);
            }
            Ok(acc)
        },
        Moments::merge,
    )
}

/// Joint version of [`mc_mean`] for two statistics of the same sample.
pub fn mc_mean_pair<F>(cfg: McConfig, statistic: F) -> Result<PairMoments>
where
    F: Fn(u64, &mut RandomStream) -> Result<(f64, f64)> + Sync + Send,
{
    check_n(cfg.n)?;
    sharded(
        cfg.n,
        cfg.workers,
        |start, end| {
            let mut acc = PairMoments::default();
            for i in start..end {
                let mut stream = derive_substream(cfg.seed, i);
                let (x, y) = statistic(i, &mut stream)?;
                acc.push(finite(x, i)?, finite(y, i)?);
            }
            Ok(acc)
        },
        PairMoments::merge,
    )
}
