//! Time series forest classification.
//!
//! Trees split on interval features (mean, standard deviation and slope of
//! a series over a sub-range of time indices). Each node samples `O(sqrt M)`
//! window lengths and `O(sqrt M)` start positions per length, and ranks
//! candidate splits by entropy gain with the threshold's margin as the
//! tie-breaker. A forest votes over independently grown trees, and the
//! entropy gains of its splits accumulate into temporal importance curves.
//!
//! Nearest-neighbour baselines (Euclidean and DTW) and loaders for UCR-style
//! text files are included for benchmarking.
//!
//! ```
//! use tsf_core::{fit, validate_dataset, ForestConfig, TimeSeries};
//!
//! let rows = vec![vec![0.0, 0.1, 0.0, 0.2], vec![1.0, 1.1, 0.9, 1.2],
//!                 vec![0.1, 0.0, 0.1, 0.0], vec![1.2, 1.0, 1.0, 0.9]];
//! let data = validate_dataset(rows, vec![1, 2, 1, 2]).unwrap();
//! let config = ForestConfig { n_trees: 25, master_seed: 7, ..ForestConfig::default() };
//! let forest = fit(&data, &config).unwrap();
//! let vote = forest.predict(&TimeSeries::new(vec![1.0, 1.0, 1.1, 1.0]).unwrap()).unwrap();
//! assert_eq!(vote.predicted, 2);
//! ```

pub mod baselines;
pub mod error;
pub mod features;
pub mod forest;
pub mod importance;
pub mod io;
pub mod model;
pub mod sampling;
pub mod split;
pub mod synth;
pub mod tree;
pub mod types;

pub use error::{Result, TsfError};
pub use forest::{fit, fit_with_threads, Forest, ForestConfig, VoteResult};
pub use importance::{importance_curves, interval_count, ImportanceCurves};
pub use split::Criterion;
pub use tree::{predict_tree, Tree, TreeConfig};
pub use types::{validate_dataset, Dataset, FeatureKind, Interval, LabelMap, TimeSeries};
