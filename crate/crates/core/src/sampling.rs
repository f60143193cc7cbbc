//! Random interval sampling and the seeded random streams behind it.
//!
//! Every stream is a ChaCha8 generator. A forest derives tree `i`'s stream
//! from the master seed by seeding ChaCha8 with the master seed and selecting
//! stream number `i`, so each tree's randomness is fixed regardless of which
//! thread builds it. Within a tree, nodes draw from the tree's stream in
//! depth-first, left-before-right order.

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TsfError};
use crate::types::Interval;

/// A deterministic, platform-independent pseudo-random stream.
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        RngStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Stream for tree `tree_index` of a forest seeded with `master_seed`.
    pub fn for_tree(master_seed: u64, tree_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(tree_index);
        RngStream(rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// `m` distinct integers drawn uniformly from `1..=n`, in draw order.
pub fn rand_samp_no_rep(rng: &mut RngStream, n: usize, m: usize) -> Result<Vec<usize>> {
    if m < 1 || m > n {
        return Err(TsfError::InvalidSampleSize { n, m });
    }
    Ok(index::sample(rng, n, m).into_iter().map(|i| i + 1).collect())
}

/// Intervals drawn at one tree node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSample {
    /// Sampled window lengths, in draw order.
    pub window_sizes: Vec<usize>,
    /// All `(t1, t1 + w - 1)` pairs, grouped by window in the same order.
    pub intervals: Vec<Interval>,
}

/// Samples `floor(sqrt(M))` window lengths without replacement and, for each
/// length `w`, `floor(sqrt(M - w + 1))` distinct start positions. Both counts
/// are at least 1.
pub fn sample_intervals(rng: &mut RngStream, series_length: usize) -> IntervalSample {
    assert!(series_length >= 1, "series length must be positive");
    let m = series_length;
    let window_sizes = rand_samp_no_rep(rng, m, m.isqrt().max(1)).expect("1 <= sqrt(M) <= M");
    let mut intervals = Vec::new();
    for &w in &window_sizes {
        let starts = m - w + 1;
        for t1 in rand_samp_no_rep(rng, starts, starts.isqrt().max(1)).expect("1 <= sqrt(n) <= n") {
            intervals.push(Interval { t1, t2: t1 + w - 1 });
        }
    }
    IntervalSample {
        window_sizes,
        intervals,
    }
}

/// Number of intervals [`sample_intervals`] returns for the given windows.
pub fn expected_interval_count(series_length: usize, window_sizes: &[usize]) -> usize {
    window_sizes
        .iter()
        .map(|&w| (series_length - w + 1).isqrt().max(1))
        .sum()
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;

    #[test]
    fn exhaustive_and_trivial_samples() {
        let mut rng = RngStream::from_seed(3);
        let mut all = rand_samp_no_rep(&mut rng, 5, 5).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![1, 2, 3, 4, 5]);
        assert_eq!(rand_samp_no_rep(&mut rng, 1, 1).unwrap(), vec![1]);
    }

    #[test]
    fn equal_seeds_give_equal_samples() {
        let a = rand_samp_no_rep(&mut RngStream::from_seed(99), 100, 10).unwrap();
        let b = rand_samp_no_rep(&mut RngStream::from_seed(99), 100, 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), 10);
    }

    #[test]
    fn invalid_sample_sizes() {
        let mut rng = RngStream::from_seed(0);
        assert!(matches!(
            rand_samp_no_rep(&mut rng, 3, 4),
            Err(TsfError::InvalidSampleSize { n: 3, m: 4 })
        ));
        assert!(rand_samp_no_rep(&mut rng, 3, 0).is_err());
    }

    #[test]
    fn length_one_has_a_single_interval() {
        let s = sample_intervals(&mut RngStream::from_seed(5), 1);
        assert_eq!(s.intervals, vec![Interval { t1: 1, t2: 1 }]);
    }

    #[test]
    fn structure_for_length_100() {
        let s = sample_intervals(&mut RngStream::from_seed(11), 100);
        assert_eq!(s.window_sizes.len(), 10);
        let windows: HashSet<_> = s.window_sizes.iter().copied().collect();
        assert_eq!(windows.len(), 10);
        for iv in &s.intervals {
            assert!(1 <= iv.t1 && iv.t1 <= iv.t2 && iv.t2 <= 100);
            assert!(windows.contains(&iv.len()));
        }
        // recomputed from the logged windows
        let expected: usize = s.window_sizes.iter().map(|&w| ((101 - w) as f64).sqrt().floor() as usize).sum();
        assert_eq!(s.intervals.len(), expected);
        assert_eq!(expected_interval_count(100, &s.window_sizes), expected);
    }

    #[test]
    fn tree_streams_differ_and_repeat() {
        let a = sample_intervals(&mut RngStream::for_tree(7, 0), 200);
        let b = sample_intervals(&mut RngStream::for_tree(7, 1), 200);
        let a2 = sample_intervals(&mut RngStream::for_tree(7, 0), 200);
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }

    #[test]
    fn interval_count_grows_linearly() {
        for m in [256usize, 512, 1024] {
            let mean_count = |len: usize| {
                (0..30u64)
                    .map(|seed| sample_intervals(&mut RngStream::from_seed(seed), len).intervals.len())
                    .sum::<usize>() as f64
                    / 30.0
            };
            let ratio = mean_count(2 * m) / mean_count(m);
            assert!((1.6..=2.4).contains(&ratio), "M = {m}: ratio {ratio}");
        }
    }

    proptest! {
        #[test]
        fn sampled_intervals_are_valid(seed in any::<u64>(), m in 1usize..400) {
            let s = sample_intervals(&mut RngStream::from_seed(seed), m);
            let mut seen = HashSet::new();
            for iv in &s.intervals {
                prop_assert!(iv.check(m).is_ok());
                prop_assert!(seen.insert(*iv), "duplicate interval {iv}");
            }
            let used: HashSet<_> = s.intervals.iter().map(|iv| iv.len()).collect();
            for w in &s.window_sizes {
                prop_assert!(used.contains(w));
            }
        }
    }
}
