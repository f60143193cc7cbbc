//! Split evaluation at a tree node.
//!
//! A candidate split tests `f_k(t1, t2) <= tau`. Within one feature kind,
//! candidates are ranked by entropy gain and then by margin (the distance from
//! `tau` to the nearest feature value at the node), which is the Entrance gain
//! with an infinitesimal margin weight. Across kinds only the entropy gain is
//! compared, since margins of different features live on different scales.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TsfError};
use crate::features::SeriesSums;
use crate::sampling::RngStream;
use crate::types::{Dataset, FeatureKind, Interval};

/// Absolute tolerance under which two entropy gains count as tied.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-12;

/// How candidates of one feature kind are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Entropy gain, ties broken by the larger margin.
    #[default]
    Entrance,
    /// Entropy gain only; ties keep the earliest candidate.
    #[serde(rename = "entropy")]
    EntropyOnly,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Entrance => "entrance",
            Criterion::EntropyOnly => "entropy",
        }
    }
}

/// Per-class instance counts at a node. Index 0 is class 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDistribution {
    counts: Vec<usize>,
    total: usize,
}

impl ClassDistribution {
    pub fn new(counts: Vec<usize>) -> Self {
        let total = counts.iter().sum();
        ClassDistribution { counts, total }
    }

    pub fn from_labels(labels: impl IntoIterator<Item = usize>, num_classes: usize) -> Self {
        let mut counts = vec![0; num_classes];
        for label in labels {
            counts[label - 1] += 1;
        }
        ClassDistribution::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn num_classes_present(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Class with the highest count; ties go to the lowest class.
    pub fn majority(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best + 1
    }
}

/// Shannon entropy (natural log) of a class distribution, with `0 ln 0 = 0`.
pub fn node_entropy(dist: &ClassDistribution) -> f64 {
    entropy_of_counts(&dist.counts, dist.total)
}

fn entropy_of_counts(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.ln();
        }
    }
    h
}

fn gain_from_counts(parent: &[usize], parent_total: usize, left: &[usize], left_total: usize) -> f64 {
    // right counts are parent - left, computed on the fly
    let n = parent_total as f64;
    let right_total = parent_total - left_total;
    let mut h_right = 0.0;
    if right_total > 0 {
        let nr = right_total as f64;
        for (&p, &l) in parent.iter().zip(left) {
            let c = p - l;
            if c > 0 {
                let q = c as f64 / nr;
                h_right -= q * q.ln();
            }
        }
    }
    let h_parent = entropy_of_counts(parent, parent_total);
    let h_left = entropy_of_counts(left, left_total);
    let gain = h_parent - (left_total as f64 / n) * h_left - (right_total as f64 / n) * h_right;
    gain.max(0.0)
}

/// Parent entropy minus the size-weighted child entropies, clamped at 0.
pub fn entropy_gain(
    parent: &ClassDistribution,
    left: &ClassDistribution,
    right: &ClassDistribution,
) -> Result<f64> {
    let k = parent.counts.len();
    if left.counts.len() != k
        || right.counts.len() != k
        || (0..k).any(|c| left.counts[c] + right.counts[c] != parent.counts[c])
    {
        return Err(TsfError::DistributionMismatch);
    }
    Ok(gain_from_counts(&parent.counts, parent.total, &left.counts, left.total))
}

/// `kappa` equally spaced thresholds strictly inside `[min, max]` of `values`:
/// `lo + i (hi - lo) / (kappa + 1)` for `i = 1..=kappa`. Empty when all
/// values are equal.
pub fn candidate_thresholds(values: &[f64], kappa: usize) -> Vec<f64> {
    let (lo, hi) = min_max(values);
    if !(lo < hi) {
        return Vec::new();
    }
    (1..=kappa).map(|i| threshold_at(lo, hi, kappa, i)).collect()
}

#[inline]
fn threshold_at(lo: f64, hi: f64, kappa: usize, i: usize) -> f64 {
    lo + i as f64 * (hi - lo) / (kappa + 1) as f64
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Distance from `threshold` to the nearest value.
pub fn split_margin(values: &[f64], threshold: f64) -> f64 {
    values
        .iter()
        .map(|v| (v - threshold).abs())
        .fold(f64::INFINITY, f64::min)
}

/// A split test `kind(interval) <= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub kind: FeatureKind,
    pub interval: Interval,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitEvaluation {
    pub candidate: SplitCandidate,
    pub entropy_gain: f64,
    pub margin: f64,
}

fn compare_gain(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= GAIN_TIE_TOLERANCE {
        Ordering::Equal
    } else if a > b {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Lexicographic Entrance ordering on `(entropy_gain, margin)`; `Greater`
/// means `a` is the better split.
pub fn compare_entrance(a: &SplitEvaluation, b: &SplitEvaluation) -> Ordering {
    compare_gain(a.entropy_gain, b.entropy_gain).then_with(|| {
        a.margin
            .partial_cmp(&b.margin)
            .expect("margins are finite")
    })
}

pub fn compare_with(criterion: Criterion, a: &SplitEvaluation, b: &SplitEvaluation) -> Ordering {
    match criterion {
        Criterion::Entrance => compare_entrance(a, b),
        Criterion::EntropyOnly => compare_gain(a.entropy_gain, b.entropy_gain),
    }
}

/// Where the feature values for a node come from.
pub trait FeatureSource {
    fn feature(&self, instance: usize, kind: FeatureKind, interval: Interval) -> f64;
}

/// Definitional features straight from the series.
impl FeatureSource for Dataset {
    fn feature(&self, instance: usize, kind: FeatureKind, interval: Interval) -> f64 {
        crate::features::compute_feature(kind, self.instance(instance), interval)
            .expect("interval valid for dataset")
    }
}

/// Constant-time features from per-series prefix sums.
impl FeatureSource for [SeriesSums] {
    fn feature(&self, instance: usize, kind: FeatureKind, interval: Interval) -> f64 {
        self[instance].feature(kind, interval)
    }
}

impl FeatureSource for Vec<SeriesSums> {
    fn feature(&self, instance: usize, kind: FeatureKind, interval: Interval) -> f64 {
        self[instance].feature(kind, interval)
    }
}

/// The instances at a node together with their class labels.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    /// Labels of the whole training set, indexed by instance.
    pub labels: &'a [usize],
    pub num_classes: usize,
    /// Training-set indices of the instances at this node.
    pub indices: &'a [usize],
}

impl NodeView<'_> {
    pub fn distribution(&self) -> ClassDistribution {
        ClassDistribution::from_labels(self.indices.iter().map(|&i| self.labels[i]), self.num_classes)
    }
}

/// Reusable buffers for scoring the thresholds of one feature.
#[derive(Debug, Default)]
pub struct SplitScratch {
    values: Vec<f64>,
    bin_counts: Vec<usize>,
    bin_min: Vec<f64>,
    bin_max: Vec<f64>,
    left: Vec<usize>,
}

/// Best threshold for one (kind, interval): `(threshold, gain, margin)`, or
/// `None` when the node's values are all equal.
///
/// Each value is assigned to the first threshold it does not exceed, so a
/// single pass collects per-bin class counts and value ranges; cumulative
/// counts then give every threshold's left child and the bin extremes give
/// its margin. Cost is `O(n + kappa * C)`.
pub fn score_thresholds(
    values: &[f64],
    node: &NodeView<'_>,
    parent: &ClassDistribution,
    kappa: usize,
    criterion: Criterion,
    scratch: &mut SplitScratch,
) -> Option<(f64, f64, f64)> {
    let (lo, hi) = min_max(values);
    if !(lo < hi) {
        return None;
    }
    let c = node.num_classes;
    let bins = kappa + 1;
    scratch.bin_counts.clear();
    scratch.bin_counts.resize(bins * c, 0);
    scratch.bin_min.clear();
    scratch.bin_min.resize(bins, f64::INFINITY);
    scratch.bin_max.clear();
    scratch.bin_max.resize(bins, f64::NEG_INFINITY);

    let step = (hi - lo) / bins as f64;
    for (&v, &i) in values.iter().zip(node.indices) {
        // bin b (0-based) holds values with tau_b < v <= tau_{b+1}, where
        // tau_0 = -inf and tau_{kappa+1} = +inf
        let mut b = (((v - lo) / step).ceil() as isize - 1).clamp(0, kappa as isize) as usize;
        while b > 0 && v <= threshold_at(lo, hi, kappa, b) {
            b -= 1;
        }
        while b < kappa && v > threshold_at(lo, hi, kappa, b + 1) {
            b += 1;
        }
        scratch.bin_counts[b * c + node.labels[i] - 1] += 1;
        scratch.bin_min[b] = scratch.bin_min[b].min(v);
        scratch.bin_max[b] = scratch.bin_max[b].max(v);
    }

    // smallest value above each threshold, by suffix minimum over bins
    let mut above = vec![f64::INFINITY; bins + 1];
    for b in (0..bins).rev() {
        above[b] = above[b + 1].min(scratch.bin_min[b]);
    }

    scratch.left.clear();
    scratch.left.resize(c, 0);
    let mut left_total = 0;
    let mut below = f64::NEG_INFINITY;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 1..=kappa {
        let b = i - 1;
        for k in 0..c {
            scratch.left[k] += scratch.bin_counts[b * c + k];
        }
        left_total += scratch.bin_counts[b * c..(b + 1) * c].iter().sum::<usize>();
        below = below.max(scratch.bin_max[b]);
        let tau = threshold_at(lo, hi, kappa, i);
        let gain = gain_from_counts(parent.counts(), parent.total(), &scratch.left, left_total);
        let margin = (tau - below).min(above[i] - tau);
        let better = match best {
            None => true,
            Some((_, g, m)) => {
                let ord = compare_gain(gain, g);
                ord == Ordering::Greater
                    || (criterion == Criterion::Entrance && ord == Ordering::Equal && margin > m)
            }
        };
        if better {
            best = Some((tau, gain, margin));
        }
    }
    best
}

/// Best split of one feature kind over the given intervals.
///
/// Candidates are enumerated interval by interval, thresholds ascending; on a
/// full tie the earlier candidate is kept. Returns `None` if no candidate has
/// positive entropy gain.
pub fn best_split_for_kind<S: FeatureSource + ?Sized>(
    source: &S,
    node: &NodeView<'_>,
    kind: FeatureKind,
    intervals: &[Interval],
    kappa: usize,
    criterion: Criterion,
) -> Option<SplitEvaluation> {
    let parent = node.distribution();
    let mut scratch = SplitScratch::default();
    best_split_for_kind_with(source, node, &parent, kind, intervals, kappa, criterion, &mut scratch)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn best_split_for_kind_with<S: FeatureSource + ?Sized>(
    source: &S,
    node: &NodeView<'_>,
    parent: &ClassDistribution,
    kind: FeatureKind,
    intervals: &[Interval],
    kappa: usize,
    criterion: Criterion,
    scratch: &mut SplitScratch,
) -> Option<SplitEvaluation> {
    let mut values = std::mem::take(&mut scratch.values);
    let mut best: Option<SplitEvaluation> = None;
    for &interval in intervals {
        values.clear();
        values.extend(node.indices.iter().map(|&i| source.feature(i, kind, interval)));
        let Some((threshold, gain, margin)) =
            score_thresholds(&values, node, parent, kappa, criterion, scratch)
        else {
            continue;
        };
        let eval = SplitEvaluation {
            candidate: SplitCandidate {
                kind,
                interval,
                threshold,
            },
            entropy_gain: gain,
            margin,
        };
        if best.map_or(true, |b| compare_with(criterion, &eval, &b) == Ordering::Greater) {
            best = Some(eval);
        }
    }
    scratch.values = values;
    best.filter(|b| b.entropy_gain > 0.0)
}

/// Picks the per-kind winner with the largest entropy gain. Gains tied within
/// [`GAIN_TIE_TOLERANCE`] are resolved uniformly at random from `rng`, which
/// is only drawn from when a tie actually occurs.
pub fn select_best_split(
    per_kind: &[Option<SplitEvaluation>],
    rng: &mut RngStream,
) -> Option<SplitEvaluation> {
    let best_gain = per_kind
        .iter()
        .flatten()
        .map(|e| e.entropy_gain)
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<&SplitEvaluation> = per_kind
        .iter()
        .flatten()
        .filter(|e| compare_gain(e.entropy_gain, best_gain) == Ordering::Equal)
        .collect();
    match tied.len() {
        0 => None,
        1 => Some(*tied[0]),
        n => Some(*tied[rng.random_range(0..n)]),
    }
}
