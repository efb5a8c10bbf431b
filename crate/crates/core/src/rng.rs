//! Counter-based random number generation.
//!
//! Every Monte Carlo replication owns an independent stream whose seed is a
//! pure function of `(master_seed, replication_index)`. Results are therefore
//! bit-identical no matter how the replication loop is partitioned across
//! threads, which is the reproducibility contract the rest of the crate
//! relies on.
//!
//! The generator itself is SplitMix64: a 64-bit counter advanced by a fixed
//! odd constant and passed through an avalanching finalizer. It is small,
//! fast, and statistically solid at the stream lengths used here.

use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the stream of replication `index` under `master_seed`.
///
/// Pure function of its two arguments; adjacent indices land on unrelated
/// streams because both words pass through the avalanching mixer.
#[inline]
pub fn stream_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed ^ mix64(index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(GOLDEN_GAMMA)))
}

/// A SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            state: seed,
            spare_normal: None,
        }
    }

    /// Stream for replication `index` under `master_seed`.
    pub fn for_replication(master_seed: u64, index: u64) -> Self {
        Stream::new(stream_seed(master_seed, index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw on [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard Normal draw via the Marsaglia polar method.
    ///
    /// The method produces draws in pairs; the spare is cached on the stream
    /// so consecutive calls consume it in order.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * factor);
                return u * factor;
            }
        }
    }

    /// Laplace draw with location 0 and scale `b`, by CDF inversion.
    pub fn laplace(&mut self, b: f64) -> f64 {
        // u - 1/2 lies in [-1/2, 1/2); inversion keeps draws finite because
        // 1 - 2|u - 1/2| > 0 for u in (0, 1).
        let mut u = self.uniform();
        while u == 0.0 {
            u = self.uniform();
        }
        let centered = u - 0.5;
        -b * centered.signum() * (1.0 - 2.0 * centered.abs()).ln()
    }
}

/// Partitioning contract for replication loops.
///
/// Replications `[0, reps)` are split into consecutive chunks of
/// `chunk_size`; chunk `i` always covers the same index range, so any
/// per-chunk reduction combined in chunk order is independent of how many
/// workers ran the chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub master_seed: u64,
    pub chunk_size: u64,
}

impl SeedPlan {
    pub fn new(master_seed: u64, chunk_size: u64) -> crate::Result<Self> {
        if chunk_size == 0 {
            return Err(crate::Error::config("SeedPlan chunk_size must be positive"));
        }
        Ok(SeedPlan {
            master_seed,
            chunk_size,
        })
    }

    /// Default desk-scale plan: chunks of 8192 replications.
    pub fn with_seed(master_seed: u64) -> Self {
        SeedPlan {
            master_seed,
            chunk_size: 8192,
        }
    }

    /// Stream for one replication index.
    pub fn stream(&self, replication: u64) -> Stream {
        Stream::for_replication(self.master_seed, replication)
    }

    pub fn n_chunks(&self, reps: u64) -> u64 {
        reps.div_ceil(self.chunk_size)
    }

    /// Replication index range covered by chunk `chunk`.
    pub fn chunk_range(&self, chunk: u64, reps: u64) -> std::ops::Range<u64> {
        let lo = chunk * self.chunk_size;
        let hi = ((chunk + 1) * self.chunk_size).min(reps);
        lo..hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = Stream::for_replication(42, 7);
        let mut b = Stream::for_replication(42, 7);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_indices_give_distinct_streams() {
        let a: Vec<u64> = {
            let mut s = Stream::for_replication(42, 0);
            (0..8).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = Stream::for_replication(42, 1);
            (0..8).map(|_| s.next_u64()).collect()
        };
        assert_ne!(a, b);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut s = Stream::new(1);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normal_moments_within_mc_bands() {
        let mut s = Stream::new(2024);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = s.normal();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        // 3 sigma bands: sd(mean) = 1/sqrt(n), sd(var) ~ sqrt(2/n)
        assert!(mean.abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt(), "var {var}");
    }

    #[test]
    fn laplace_variance_is_two_b_squared() {
        let mut s = Stream::new(99);
        let b = 0.7;
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = s.laplace(b);
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let target = 2.0 * b * b;
        // Var of the variance estimate for Laplace: (kurtosis 6) => (6-1)*var^2/n... use a loose 5 sigma band.
        let band = 5.0 * target * (5.0 / n as f64).sqrt();
        assert!((var - target).abs() < band, "var {var} target {target}");
    }

    #[test]
    fn chunk_ranges_tile_the_replications() {
        let plan = SeedPlan::new(5, 100).unwrap();
        let reps = 1234;
        let mut covered = 0;
        for c in 0..plan.n_chunks(reps) {
            let r = plan.chunk_range(c, reps);
            covered += r.end - r.start;
        }
        assert_eq!(covered, reps);
        assert_eq!(plan.chunk_range(12, reps), 1200..1234);
    }

    #[test]
    fn zero_chunk_size_rejected() {
        assert!(matches!(SeedPlan::new(1, 0), Err(crate::Error::Config(_))));
    }
}
