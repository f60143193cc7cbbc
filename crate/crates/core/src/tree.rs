//! Time series tree induction and prediction.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TsfError};
use crate::features::SeriesSums;
use crate::sampling::{sample_intervals, RngStream};
use crate::split::{
    best_split_for_kind_with, select_best_split, ClassDistribution, Criterion, NodeView, SplitScratch,
};
use crate::types::{Dataset, FeatureKind, Interval, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Candidate thresholds per (kind, interval).
    pub kappa: usize,
    /// Depth cap; the root has depth 0. `None` grows until no split gains.
    pub max_depth: Option<usize>,
    /// Nodes with fewer instances become leaves.
    pub min_node_size: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            kappa: 20,
            max_depth: None,
            min_node_size: 2,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kappa < 1 {
            return Err(TsfError::InvalidConfig("kappa must be at least 1".into()));
        }
        if self.min_node_size < 2 {
            return Err(TsfError::InvalidConfig("min_node_size must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitNode {
    pub kind: FeatureKind,
    pub interval: Interval,
    pub threshold: f64,
    /// Entropy gain of this split on the training instances at the node.
    pub gain: f64,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafNode {
    pub label: usize,
    /// Training instances per class that reached this leaf; index 0 is class 1.
    pub class_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split(SplitNode),
    Leaf(LeafNode),
}

/// A tree stored as a node arena in depth-first order; node 0 is the root and
/// every left subtree precedes its sibling.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    series_length: usize,
}

impl Tree {
    /// Assembles a tree from an arena, checking child links and intervals.
    pub fn from_nodes(nodes: Vec<Node>, series_length: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(TsfError::Model("tree has no nodes".into()));
        }
        let mut parents = vec![0usize; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            if let Node::Split(s) = node {
                s.interval
                    .check(series_length)
                    .map_err(|e| TsfError::Model(e.to_string()))?;
                for child in [s.left, s.right] {
                    if child <= i || child >= nodes.len() {
                        return Err(TsfError::Model(format!("node {i} has invalid child {child}")));
                    }
                    parents[child] += 1;
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err(TsfError::Model("node links do not form a tree".into()));
        }
        Ok(Tree {
            nodes,
            series_length,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split(s) => 1 + go(nodes, s.left).max(go(nodes, s.right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn split_nodes(&self) -> impl Iterator<Item = &SplitNode> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split(s) => Some(s),
            Node::Leaf(_) => None,
        })
    }

    /// Index of the leaf reached by a series summarized by `sums`.
    pub fn leaf_index(&self, sums: &SeriesSums) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(_) => return i,
                Node::Split(s) => {
                    i = if sums.feature(s.kind, s.interval) <= s.threshold {
                        s.left
                    } else {
                        s.right
                    };
                }
            }
        }
    }

    pub fn leaf(&self, sums: &SeriesSums) -> &LeafNode {
        match &self.nodes[self.leaf_index(sums)] {
            Node::Leaf(leaf) => leaf,
            Node::Split(_) => unreachable!("leaf_index stops at leaves"),
        }
    }
}

/// Class label for `series`: left whenever the node's feature is at most its
/// threshold.
///
/// Features are evaluated through [`SeriesSums`], the same path used during
/// induction, so a training series is routed exactly as it was partitioned.
pub fn predict_tree(tree: &Tree, series: &TimeSeries) -> Result<usize> {
    if series.len() != tree.series_length {
        return Err(TsfError::LengthMismatch {
            what: "series",
            expected: tree.series_length,
            found: series.len(),
        });
    }
    Ok(tree.leaf(&SeriesSums::new(series)).label)
}

/// Training data prepared for induction: the dataset plus prefix sums of
/// every instance. Built once and shared by all trees of a forest.
#[derive(Debug)]
pub struct TrainingSet<'a> {
    data: &'a Dataset,
    sums: Vec<SeriesSums>,
}

impl<'a> TrainingSet<'a> {
    pub fn new(data: &'a Dataset) -> Self {
        TrainingSet {
            data,
            sums: data.instances().iter().map(SeriesSums::new).collect(),
        }
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn sums(&self) -> &[SeriesSums] {
        &self.sums
    }
}

/// Why a node became a leaf, or that it split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeOutcome {
    Split,
    Pure,
    BelowMinSize,
    MaxDepth,
    /// No sampled candidate had positive entropy gain.
    NoGain { sampled: Vec<Interval> },
}

/// Per-node record of an induction run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTrace {
    pub node: usize,
    pub depth: usize,
    pub instances: Vec<usize>,
    pub outcome: NodeOutcome,
}

/// Grows a tree on the instances at `indices`.
pub fn build_tree(
    training: &TrainingSet<'_>,
    indices: &[usize],
    config: &TreeConfig,
    criterion: Criterion,
    rng: &mut RngStream,
) -> Tree {
    grow(training, indices, config, criterion, rng, None)
}

/// As [`build_tree`], also recording what happened at every node.
pub fn build_tree_traced(
    training: &TrainingSet<'_>,
    indices: &[usize],
    config: &TreeConfig,
    criterion: Criterion,
    rng: &mut RngStream,
) -> (Tree, Vec<NodeTrace>) {
    let mut trace = Vec::new();
    let tree = grow(training, indices, config, criterion, rng, Some(&mut trace));
    (tree, trace)
}

fn grow(
    training: &TrainingSet<'_>,
    indices: &[usize],
    config: &TreeConfig,
    criterion: Criterion,
    rng: &mut RngStream,
    mut trace: Option<&mut Vec<NodeTrace>>,
) -> Tree {
    assert!(!indices.is_empty(), "cannot grow a tree on zero instances");
    let data = training.data;
    let m = data.series_length();
    let mut nodes: Vec<Node> = Vec::new();
    let mut scratch = SplitScratch::default();
    // (instances, depth, parent link); popped depth-first, left child first
    let mut stack: Vec<(Vec<usize>, usize, Option<(usize, bool)>)> = vec![(indices.to_vec(), 0, None)];

    while let Some((members, depth, parent)) = stack.pop() {
        let id = nodes.len();
        if let Some((p, is_left)) = parent {
            if let Node::Split(s) = &mut nodes[p] {
                if is_left {
                    s.left = id;
                } else {
                    s.right = id;
                }
            }
        }
        let node = NodeView {
            labels: data.labels(),
            num_classes: data.num_classes(),
            indices: &members,
        };
        let dist = node.distribution();

        let stop = if dist.num_classes_present() <= 1 {
            Some(NodeOutcome::Pure)
        } else if members.len() < config.min_node_size {
            Some(NodeOutcome::BelowMinSize)
        } else if config.max_depth.is_some_and(|d| depth >= d) {
            Some(NodeOutcome::MaxDepth)
        } else {
            None
        };

        let (outcome, split) = match stop {
            Some(outcome) => (outcome, None),
            None => {
                let sample = sample_intervals(rng, m);
                let per_kind: Vec<_> = FeatureKind::ALL
                    .iter()
                    .map(|&kind| {
                        best_split_for_kind_with(
                            training.sums.as_slice(),
                            &node,
                            &dist,
                            kind,
                            &sample.intervals,
                            config.kappa,
                            criterion,
                            &mut scratch,
                        )
                    })
                    .collect();
                match select_best_split(&per_kind, rng) {
                    Some(best) => (NodeOutcome::Split, Some(best)),
                    None => (
                        NodeOutcome::NoGain {
                            sampled: sample.intervals,
                        },
                        None,
                    ),
                }
            }
        };

        match split {
            Some(best) => {
                let c = best.candidate;
                let (left, right): (Vec<usize>, Vec<usize>) = members
                    .iter()
                    .partition(|&&i| training.sums[i].feature(c.kind, c.interval) <= c.threshold);
                assert!(
                    !left.is_empty() && !right.is_empty(),
                    "interior threshold produced an empty child"
                );
                nodes.push(Node::Split(SplitNode {
                    kind: c.kind,
                    interval: c.interval,
                    threshold: c.threshold,
                    gain: best.entropy_gain,
                    left: usize::MAX,
                    right: usize::MAX,
                }));
                if let Some(t) = trace.as_deref_mut() {
                    t.push(NodeTrace {
                        node: id,
                        depth,
                        instances: members.clone(),
                        outcome,
                    });
                }
                stack.push((right, depth + 1, Some((id, false))));
                stack.push((left, depth + 1, Some((id, true))));
            }
            None => {
                nodes.push(Node::Leaf(leaf_for(&dist)));
                if let Some(t) = trace.as_deref_mut() {
                    t.push(NodeTrace {
                        node: id,
                        depth,
                        instances: members,
                        outcome,
                    });
                }
            }
        }
    }

    Tree {
        nodes,
        series_length: m,
    }
}

fn leaf_for(dist: &ClassDistribution) -> LeafNode {
    LeafNode {
        label: dist.majority(),
        class_counts: dist.counts().to_vec(),
    }
}
