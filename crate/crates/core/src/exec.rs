//! Deterministic chunked execution and running moment accumulators.
//!
//! Replication loops run chunk by chunk as laid out by a [`SeedPlan`]. Chunks
//! may be executed by any number of worker threads; the per-chunk results are
//! reassembled in chunk order before reduction, so the final floating-point
//! values do not depend on the worker count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::rng::SeedPlan;
use crate::{Error, Result};

/// Worker count used when the caller does not specify one.
pub fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Runs `f(chunk_index, replication_range)` for every chunk of `reps`
/// replications and returns the results in chunk order.
///
/// `threads = 1` runs inline. Errors from any chunk abort the whole call;
/// the error from the lowest chunk index wins so the outcome is stable.
pub fn map_chunks<T, F>(plan: &SeedPlan, reps: u64, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, std::ops::Range<u64>) -> Result<T> + Sync,
{
    let n_chunks = plan.n_chunks(reps);
    if n_chunks == 0 {
        return Ok(Vec::new());
    }
    let workers = threads.clamp(1, n_chunks as usize);

    if workers == 1 {
        let mut out = Vec::with_capacity(n_chunks as usize);
        for c in 0..n_chunks {
            out.push(f(c, plan.chunk_range(c, reps))?);
        }
        return Ok(out);
    }

    let next = AtomicU64::new(0);
    let results: Mutex<Vec<(u64, Result<T>)>> = Mutex::new(Vec::with_capacity(n_chunks as usize));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= n_chunks {
                    break;
                }
                let r = f(c, plan.chunk_range(c, reps));
                results.lock().unwrap().push((c, r));
            });
        }
    });

    let mut collected = results.into_inner().unwrap();
    collected.sort_by_key(|(c, _)| *c);
    let mut out = Vec::with_capacity(collected.len());
    let mut first_err: Option<(u64, Error)> = None;
    for (c, r) in collected {
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                if first_err.as_ref().is_none_or(|(fc, _)| c < *fc) {
                    first_err = Some((c, e));
                }
            }
        }
    }
    match first_err {
        Some((_, e)) => Err(e),
        None => Ok(out),
    }
}

/// Welford running mean/variance with deterministic chunk merging.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        RunningStats::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Merge another accumulator (Chan et al. pairwise combination).
    /// Merging in a fixed order keeps the result bit-stable.
    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n1 = self.n as f64;
        let n2 = other.n as f64;
        let total = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * (n2 / total);
        self.m2 += other.m2 + delta * delta * (n1 * n2 / total);
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (n - 1 denominator); zero for n < 2.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Fold per-chunk stats in chunk order.
pub fn merge_stats(chunks: &[RunningStats]) -> RunningStats {
    let mut acc = RunningStats::new();
    for c in chunks {
        acc.merge(c);
    }
    acc
}
