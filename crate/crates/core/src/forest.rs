//! Forest construction and majority-vote prediction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TsfError};
use crate::features::SeriesSums;
use crate::sampling::RngStream;
use crate::split::Criterion;
use crate::tree::{build_tree, Tree, TrainingSet, TreeConfig};
use crate::types::{Dataset, LabelMap, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub tree: TreeConfig,
    pub master_seed: u64,
    pub criterion: Criterion,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 500,
            tree: TreeConfig::default(),
            master_seed: 0,
            criterion: Criterion::Entrance,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(TsfError::InvalidConfig("n_trees must be at least 1".into()));
        }
        self.tree.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub(crate) trees: Vec<Tree>,
    pub(crate) num_classes: usize,
    pub(crate) series_length: usize,
    pub(crate) config: ForestConfig,
    pub(crate) label_map: LabelMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteResult {
    /// Votes per class; index 0 is class 1.
    pub votes: Vec<usize>,
    pub predicted: usize,
}

/// Trains a forest using the global rayon pool.
pub fn fit(data: &Dataset, config: &ForestConfig) -> Result<Forest> {
    config.validate()?;
    let training = TrainingSet::new(data);
    let indices: Vec<usize> = (0..data.len()).collect();
    let trees: Vec<Tree> = (0..config.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::for_tree(config.master_seed, i as u64);
            build_tree(&training, &indices, &config.tree, config.criterion, &mut rng)
        })
        .collect();
    Ok(Forest {
        trees,
        num_classes: data.num_classes(),
        series_length: data.series_length(),
        config: *config,
        label_map: data.label_map().clone(),
    })
}

/// Trains a forest on a dedicated pool of `threads` workers. The result does
/// not depend on the worker count.
pub fn fit_with_threads(data: &Dataset, config: &ForestConfig, threads: usize) -> Result<Forest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| TsfError::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| fit(data, config))
}

impl Forest {
    /// Assembles a forest from parts, checking that they agree.
    pub fn from_parts(
        trees: Vec<Tree>,
        num_classes: usize,
        series_length: usize,
        config: ForestConfig,
        label_map: LabelMap,
    ) -> Result<Self> {
        if trees.len() != config.n_trees {
            return Err(TsfError::Model(format!(
                "{} trees present, config says {}",
                trees.len(),
                config.n_trees
            )));
        }
        if label_map.num_classes() != num_classes {
            return Err(TsfError::Model("label map does not match class count".into()));
        }
        for tree in &trees {
            if tree.series_length() != series_length {
                return Err(TsfError::Model("tree trained on a different series length".into()));
            }
            for node in tree.nodes() {
                if let crate::tree::Node::Leaf(leaf) = node {
                    if leaf.label < 1 || leaf.label > num_classes || leaf.class_counts.len() != num_classes {
                        return Err(TsfError::Model("leaf inconsistent with class count".into()));
                    }
                }
            }
        }
        Ok(Forest {
            trees,
            num_classes,
            series_length,
            config,
            label_map,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn label_map(&self) -> &LabelMap {
        &self.label_map
    }

    /// One vote per tree; the prediction is the most voted class, ties to
    /// the lowest class.
    pub fn predict(&self, series: &TimeSeries) -> Result<VoteResult> {
        self.check_length(series.len())?;
        Ok(self.vote(&SeriesSums::new(series)))
    }

    fn vote(&self, sums: &SeriesSums) -> VoteResult {
        let mut votes = vec![0; self.num_classes];
        for tree in &self.trees {
            votes[tree.leaf(sums).label - 1] += 1;
        }
        let mut predicted = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[predicted] {
                predicted = c;
            }
        }
        VoteResult {
            votes,
            predicted: predicted + 1,
        }
    }

    /// Predicted class for every instance of `test`, in order.
    pub fn predict_all(&self, test: &Dataset) -> Result<Vec<usize>> {
        self.check_length(test.series_length())?;
        Ok(test
            .instances()
            .par_iter()
            .map(|s| self.vote(&SeriesSums::new(s)).predicted)
            .collect())
    }

    /// Fraction of misclassified test instances.
    pub fn evaluate(&self, test: &Dataset) -> Result<f64> {
        let predicted = self.predict_all(test)?;
        let wrong = predicted
            .iter()
            .zip(test.labels())
            .filter(|(p, l)| p != l)
            .count();
        Ok(wrong as f64 / test.len() as f64)
    }

    /// The first `n` trees as a forest of their own.
    pub fn truncated(&self, n: usize) -> Result<Forest> {
        if n < 1 || n > self.trees.len() {
            return Err(TsfError::InvalidConfig(format!(
                "cannot keep {n} of {} trees",
                self.trees.len()
            )));
        }
        let mut config = self.config;
        config.n_trees = n;
        Ok(Forest {
            trees: self.trees[..n].to_vec(),
            config,
            ..self.clone()
        })
    }

    fn check_length(&self, found: usize) -> Result<()> {
        if found != self.series_length {
            return Err(TsfError::LengthMismatch {
                what: "series",
                expected: self.series_length,
                found,
            });
        }
        Ok(())
    }
}
