//! Seeding, thread-count independence, model round trips and voting.

mod common;

use common::*;
use proptest::prelude::*;
use tsf_core::baselines::{nn_classify, Metric, WarpingWindow};
use tsf_core::model::{from_model_str, to_model_string};
use tsf_core::tree::{LeafNode, Node, SplitNode};
use tsf_core::{fit, importance_curves, Criterion, FeatureKind, Forest, Interval, LabelMap, Tree};

#[test]
fn thread_count_never_changes_the_model() {
    for seed in [1, 2] {
        check_thread_independence(seed, Criterion::Entrance).unwrap();
        check_thread_independence(seed, Criterion::EntropyOnly).unwrap();
    }
}

#[test]
fn seeds_change_the_model() {
    let data = small_shifted(1);
    let a = to_model_string(&fit(&data, &config(8, 1, Criterion::Entrance)).unwrap());
    let b = to_model_string(&fit(&data, &config(8, 2, Criterion::Entrance)).unwrap());
    assert_ne!(a, b);
}

#[test]
fn tree_i_depends_only_on_its_own_stream() {
    let data = small_shifted(2);
    let big = fit(&data, &config(12, 3, Criterion::Entrance)).unwrap();
    let small = fit(&data, &config(5, 3, Criterion::Entrance)).unwrap();
    assert_eq!(&big.trees()[..5], small.trees());
    assert_eq!(big.truncated(5).unwrap().trees(), small.trees());
}

#[test]
fn model_round_trip_is_byte_identical() {
    for seed in [3, 4] {
        check_round_trip(seed, Criterion::Entrance).unwrap();
        check_round_trip(seed, Criterion::EntropyOnly).unwrap();
    }
}

#[test]
fn votes_sum_to_the_tree_count() {
    check_votes(4).unwrap();
    check_votes(5).unwrap();
}

#[test]
fn tied_votes_go_to_the_lowest_class() {
    check_vote_tie_rule().unwrap();
}

#[test]
fn importance_bookkeeping_identity() {
    let data = small_shifted(5);
    let forest = fit(&data, &config(20, 2, Criterion::Entrance)).unwrap();
    let curves = importance_curves(&forest);
    for kind in FeatureKind::ALL {
        assert!(curves.curve(kind).iter().all(|&v| v >= 0.0));
        let total: f64 = curves.curve(kind).iter().sum();
        let expected: f64 = forest
            .trees()
            .iter()
            .flat_map(|t| t.split_nodes())
            .filter(|s| s.kind == kind)
            .map(|s| s.gain * s.interval.len() as f64)
            .sum();
        assert!((total - expected).abs() <= 1e-9 * expected.max(1.0), "{kind:?}: {total} vs {expected}");
    }
}

#[test]
fn euclidean_and_diagonal_dtw_pick_the_same_labels() {
    let train = small_shifted(6);
    let test = small_shifted(7);
    let diagonal = Metric::Dtw(WarpingWindow::new(0).unwrap());
    for q in test.instances() {
        assert_eq!(
            nn_classify(&train, q, Metric::Euclidean).unwrap(),
            nn_classify(&train, q, diagonal).unwrap()
        );
    }
}

proptest! {
    #[test]
    fn any_threshold_and_gain_survive_a_round_trip(
        tau in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL,
        gain in 0.0f64..2.0,
    ) {
        let leaf = |label: usize, counts: Vec<usize>| Node::Leaf(LeafNode { label, class_counts: counts });
        let tree = Tree::from_nodes(
            vec![
                Node::Split(SplitNode {
                    kind: FeatureKind::Slope,
                    interval: Interval { t1: 2, t2: 3 },
                    threshold: tau,
                    gain,
                    left: 1,
                    right: 2,
                }),
                leaf(1, vec![2, 0]),
                leaf(2, vec![0, 1]),
            ],
            3,
        )
        .unwrap();
        let forest = Forest::from_parts(vec![tree], 2, 3, config(1, 0, Criterion::Entrance), LabelMap::identity(2)).unwrap();
        let text = to_model_string(&forest);
        let loaded = from_model_str(&text).unwrap();
        prop_assert_eq!(&loaded, &forest);
        prop_assert_eq!(to_model_string(&loaded), text);
    }
}
