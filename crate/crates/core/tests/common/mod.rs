//! Oracles, strategies and checks shared by the property suites and the
//! acceptance run.

#![allow(dead_code)]

use proptest::prelude::*;
use tsf_core::baselines::{dtw_distance, WarpingWindow};
use tsf_core::features::{compute_slope, SeriesSums};
use tsf_core::model::{from_model_str, to_model_string};
use tsf_core::split::{best_split_for_kind, Criterion, FeatureSource, NodeView, SplitEvaluation};
use tsf_core::synth::{generate_shifted_dataset, ClassOverride, SyntheticSpec};
use tsf_core::tree::{LeafNode, Node};
use tsf_core::{
    fit, fit_with_threads, importance_curves, validate_dataset, Dataset, FeatureKind, Forest, ForestConfig, Interval,
    LabelMap, TimeSeries, Tree,
};

// ---- split search ----

pub fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

pub struct OracleSplit {
    pub gain: f64,
    pub margin: f64,
}

/// Best (gain, margin) over all intervals and thresholds, ranked by gain and
/// then by margin, or by gain alone when `use_margin` is false. Feature
/// values come from `source`, so the oracle sees exactly what the search sees.
pub fn split_oracle<S: FeatureSource + ?Sized>(
    source: &S,
    data: &Dataset,
    indices: &[usize],
    kind: FeatureKind,
    kappa: usize,
    use_margin: bool,
) -> Option<OracleSplit> {
    let m = data.series_length();
    let c = data.num_classes();
    let mut parent = vec![0; c];
    for &i in indices {
        parent[data.label(i) - 1] += 1;
    }
    let h_parent = entropy(&parent);
    let n = indices.len() as f64;
    let mut best: Option<OracleSplit> = None;
    for iv in all_intervals(m) {
        let values: Vec<f64> = indices
            .iter()
            .map(|&i| source.feature(i, kind, iv))
            .collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            continue;
        }
        for k in 1..=kappa {
            let tau = lo + k as f64 * (hi - lo) / (kappa + 1) as f64;
            let mut left = vec![0; c];
            let mut right = vec![0; c];
            for (&i, &v) in indices.iter().zip(&values) {
                if v <= tau {
                    left[data.label(i) - 1] += 1;
                } else {
                    right[data.label(i) - 1] += 1;
                }
            }
            let nl: usize = left.iter().sum();
            let nr: usize = right.iter().sum();
            let gain = h_parent - (nl as f64 / n) * entropy(&left) - (nr as f64 / n) * entropy(&right);
            let margin = values.iter().map(|v| (v - tau).abs()).fold(f64::INFINITY, f64::min);
            let better = match &best {
                None => true,
                Some(b) => gain > b.gain + 1e-12 || (use_margin && (gain - b.gain).abs() <= 1e-12 && margin > b.margin),
            };
            if better {
                best = Some(OracleSplit { gain, margin });
            }
        }
    }
    best.filter(|b| b.gain > 1e-12)
}

pub fn all_intervals(m: usize) -> Vec<Interval> {
    (1..=m).flat_map(|t1| (t1..=m).map(move |t2| Interval { t1, t2 })).collect()
}

pub type SmallNode = (Vec<Vec<f64>>, Vec<i64>, usize, usize);

/// Nodes of 2..=12 instances, length 1..=6, 2 or 3 classes, with kappa.
pub fn small_node() -> impl Strategy<Value = SmallNode> {
    (2usize..=12, 1usize..=6, 2usize..=3, 1usize..=20).prop_flat_map(|(n, m, c, kappa)| {
        (
            prop::collection::vec(prop::collection::vec(-5i32..5, m), n)
                .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(|v| v as f64 * 0.5).collect()).collect()),
            prop::collection::vec(1i64..=c as i64, n),
            Just(c),
            Just(kappa),
        )
    })
}

/// The split search over every interval agrees with the oracle, for both
/// criteria, with definitional features and with the prefix-sum fast path.
pub fn check_split_node((rows, mut labels, c, kappa): SmallNode) -> Result<(), TestCaseError> {
    // every class up to c must occur
    for (k, l) in labels.iter_mut().take(c).enumerate() {
        *l = k as i64 + 1;
    }
    let data = validate_dataset(rows, labels).unwrap();
    let indices: Vec<usize> = (0..data.len()).collect();
    let node = NodeView {
        labels: data.labels(),
        num_classes: data.num_classes(),
        indices: &indices,
    };
    let intervals = all_intervals(data.series_length());
    let sums: Vec<SeriesSums> = data.instances().iter().map(SeriesSums::new).collect();
    for kind in FeatureKind::ALL {
        for (criterion, use_margin) in [(Criterion::Entrance, true), (Criterion::EntropyOnly, false)] {
            compare(
                split_oracle(&data, &data, &indices, kind, kappa, use_margin),
                best_split_for_kind(&data, &node, kind, &intervals, kappa, criterion),
                use_margin,
            )?;
            compare(
                split_oracle(&sums, &data, &indices, kind, kappa, use_margin),
                best_split_for_kind(&sums, &node, kind, &intervals, kappa, criterion),
                use_margin,
            )?;
        }
    }
    Ok(())
}

fn compare(expected: Option<OracleSplit>, got: Option<SplitEvaluation>, use_margin: bool) -> Result<(), TestCaseError> {
    match (&expected, &got) {
        (None, None) => {}
        (Some(e), Some(g)) => {
            prop_assert!((g.entropy_gain - e.gain).abs() <= 1e-9, "gain {} vs {}", g.entropy_gain, e.gain);
            if use_margin {
                prop_assert!((g.margin - e.margin).abs() <= 1e-9, "margin {} vs {}", g.margin, e.margin);
            }
        }
        _ => prop_assert!(false, "oracle {:?} vs search {:?}", expected.map(|e| e.gain), got),
    }
    Ok(())
}

// ---- slope ----

/// Slope from the normal equations of `v = a + b t`, by Cramer's rule.
pub fn normal_equations_slope(t1: usize, values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let (mut st, mut stt, mut sv, mut stv) = (0.0, 0.0, 0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        let t = (t1 + i) as f64;
        st += t;
        stt += t * t;
        sv += v;
        stv += t * v;
    }
    (n * stv - st * sv) / (n * stt - st * st)
}

pub fn series_and_interval() -> impl Strategy<Value = (Vec<f64>, Interval)> {
    prop::collection::vec(-100.0f64..100.0, 2..300).prop_flat_map(|values| {
        let m = values.len();
        (Just(values), 1..m).prop_flat_map(move |(values, t1)| {
            (Just(values), t1 + 1..=m).prop_map(move |(values, t2)| (values, Interval { t1, t2 }))
        })
    })
}

pub fn check_slope((values, interval): (Vec<f64>, Interval)) -> Result<(), TestCaseError> {
    let s = TimeSeries::new(values).unwrap();
    let oracle = normal_equations_slope(interval.t1, s.slice(interval));
    let got = compute_slope(&s, interval).unwrap();
    // relative to the larger of the two slopes, floored at the slope scale
    // of the data so that near-zero slopes are not judged on cancellation noise
    let scale = (200.0 / interval.len() as f64).max(got.abs()).max(oracle.abs());
    prop_assert!((got - oracle).abs() <= 1e-9 * scale, "{got} vs {oracle}");
    let fast = SeriesSums::new(&s).slope(interval);
    prop_assert!((fast - oracle).abs() <= 1e-9 * scale, "{fast} vs {oracle}");
    Ok(())
}

// ---- DTW ----

pub fn series_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..40).prop_flat_map(|m| {
        (
            prop::collection::vec(-10.0f64..10.0, m),
            prop::collection::vec(-10.0f64..10.0, m),
        )
    })
}

/// Widening the band never increases the distance.
pub fn check_band_monotone((a, b): (Vec<f64>, Vec<f64>)) -> Result<(), TestCaseError> {
    let a = TimeSeries::new(a).unwrap();
    let b = TimeSeries::new(b).unwrap();
    let mut previous = f64::INFINITY;
    for r in (0..=100).step_by(10) {
        let d = dtw_distance(&a, &b, WarpingWindow::new(r).unwrap()).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(d <= previous, "r={r}: {d} > {previous}");
        previous = d;
    }
    Ok(())
}

// ---- forests ----

pub fn small_shifted(seed: u64) -> Dataset {
    let spec = SyntheticSpec {
        series_length: 60,
        per_class: 15,
        seed,
        overrides: vec![
            ClassOverride {
                interval: Interval { t1: 11, t2: 20 },
                mean_shift: 1.0,
                std_factor: 1.0,
            },
            ClassOverride {
                interval: Interval { t1: 31, t2: 40 },
                mean_shift: 0.0,
                std_factor: 2.0,
            },
        ],
    };
    generate_shifted_dataset(&spec).unwrap()
}

pub fn config(n_trees: usize, seed: u64, criterion: Criterion) -> ForestConfig {
    ForestConfig {
        n_trees,
        master_seed: seed,
        criterion,
        ..ForestConfig::default()
    }
}

/// One worker, four workers and the global pool give byte-identical models.
pub fn check_thread_independence(seed: u64, criterion: Criterion) -> Result<(), TestCaseError> {
    let data = small_shifted(seed);
    let cfg = config(16, seed, criterion);
    let serial = to_model_string(&fit_with_threads(&data, &cfg, 1).unwrap());
    let parallel = to_model_string(&fit_with_threads(&data, &cfg, 4).unwrap());
    let default = to_model_string(&fit(&data, &cfg).unwrap());
    prop_assert_eq!(&serial, &parallel);
    prop_assert_eq!(&serial, &default);
    Ok(())
}

/// save, load, save gives the same bytes, and the loaded model behaves the same.
pub fn check_round_trip(seed: u64, criterion: Criterion) -> Result<(), TestCaseError> {
    let data = small_shifted(seed);
    let forest = fit(&data, &config(10, seed, criterion)).unwrap();
    let text = to_model_string(&forest);
    let loaded = from_model_str(&text).unwrap();
    prop_assert_eq!(&to_model_string(&loaded), &text);
    prop_assert_eq!(importance_curves(&loaded), importance_curves(&forest));
    for s in data.instances() {
        prop_assert_eq!(loaded.predict(s).unwrap(), forest.predict(s).unwrap());
    }
    Ok(())
}

/// Votes add up to the tree count and the prediction is the lowest most-voted class.
pub fn check_votes(seed: u64) -> Result<(), TestCaseError> {
    let data = small_shifted(seed);
    let forest = fit(&data, &config(15, seed, Criterion::Entrance)).unwrap();
    for s in data.instances() {
        let vote = forest.predict(s).unwrap();
        prop_assert_eq!(vote.votes.iter().sum::<usize>(), 15);
        let max = *vote.votes.iter().max().unwrap();
        let first = vote.votes.iter().position(|&v| v == max).unwrap() + 1;
        prop_assert_eq!(vote.predicted, first);
    }
    Ok(())
}

/// Five single-leaf trees voting 3, 2, 3, 2, 1 predict class 2.
pub fn check_vote_tie_rule() -> Result<(), TestCaseError> {
    let leaf = |label: usize| {
        let mut class_counts = vec![0; 3];
        class_counts[label - 1] = 1;
        Tree::from_nodes(vec![Node::Leaf(LeafNode { label, class_counts })], 4).unwrap()
    };
    let forest = Forest::from_parts(
        vec![leaf(3), leaf(2), leaf(3), leaf(2), leaf(1)],
        3,
        4,
        config(5, 0, Criterion::Entrance),
        LabelMap::identity(3),
    )
    .unwrap();
    let vote = forest.predict(&TimeSeries::new(vec![0.0; 4]).unwrap()).unwrap();
    prop_assert_eq!(vote.votes, vec![1, 2, 2]);
    prop_assert_eq!(vote.predicted, 2);
    Ok(())
}
