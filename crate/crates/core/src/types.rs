//! Shared domain vocabulary: series, datasets, class labels, intervals and
//! feature kinds.
//!
//! Time indices are 1-based in every public interface. A series of length `M`
//! is indexed `1..=M`, and an [`Interval`] `(t1, t2)` covers both endpoints.
//! Class labels are likewise 1-based, `1..=C`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TsfError};

/// A fixed-length, finite, real-valued sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(TsfError::EmptyDataset);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(TsfError::NonFiniteValue {
                instance: 0,
                t: pos + 1,
            });
        }
        Ok(TimeSeries(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Value at the 1-based time index `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.0[t - 1]
    }

    /// Values covered by `interval`, which must already be valid for this series.
    pub fn slice(&self, interval: Interval) -> &[f64] {
        &self.0[interval.t1 - 1..interval.t2]
    }
}

/// An inclusive, 1-based index range `[t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub t1: usize,
    pub t2: usize,
}

impl Interval {
    /// Builds an interval checked against a series of length `length`.
    pub fn new(t1: usize, t2: usize, length: usize) -> Result<Self> {
        let interval = Interval { t1, t2 };
        interval.check(length)?;
        Ok(interval)
    }

    pub fn check(&self, length: usize) -> Result<()> {
        if self.t1 < 1 || self.t1 > self.t2 || self.t2 > length {
            return Err(TsfError::InvalidInterval {
                t1: self.t1,
                t2: self.t2,
                length,
            });
        }
        Ok(())
    }

    /// Number of time points covered, `t2 - t1 + 1`.
    pub fn len(&self) -> usize {
        self.t2 - self.t1 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: usize) -> bool {
        self.t1 <= t && t <= self.t2
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.t1, self.t2)
    }
}

/// The three interval feature types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Mean,
    StdDev,
    Slope,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Mean, FeatureKind::StdDev, FeatureKind::Slope];

    /// 1-based ordinal: mean = 1, standard deviation = 2, slope = 3.
    pub fn ordinal(self) -> usize {
        match self {
            FeatureKind::Mean => 1,
            FeatureKind::StdDev => 2,
            FeatureKind::Slope => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Mean => "mean",
            FeatureKind::StdDev => "stddev",
            FeatureKind::Slope => "slope",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Mapping between contiguous class labels `1..=C` and the labels found in
/// the source data. `original[c - 1]` is the source label of class `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    original: Vec<i64>,
}

impl LabelMap {
    pub fn identity(num_classes: usize) -> Self {
        LabelMap {
            original: (1..=num_classes as i64).collect(),
        }
    }

    /// Builds a map from the distinct labels in `labels`, ordered numerically.
    pub fn from_labels(labels: &[i64]) -> Self {
        let mut original = labels.to_vec();
        original.sort_unstable();
        original.dedup();
        LabelMap { original }
    }

    pub fn from_original(original: Vec<i64>) -> Result<Self> {
        if original.is_empty() || original.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TsfError::InvalidConfig(
                "label map must be non-empty and strictly increasing".into(),
            ));
        }
        Ok(LabelMap { original })
    }

    pub fn num_classes(&self) -> usize {
        self.original.len()
    }

    pub fn original_labels(&self) -> &[i64] {
        &self.original
    }

    /// Contiguous class for a source label.
    pub fn class_of(&self, label: i64) -> Result<usize> {
        self.original
            .binary_search(&label)
            .map(|i| i + 1)
            .map_err(|_| TsfError::UnknownLabel(label))
    }

    /// Source label for a contiguous class.
    pub fn original_of(&self, class: usize) -> i64 {
        self.original[class - 1]
    }
}

/// `N` labelled series of common length `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    instances: Vec<TimeSeries>,
    labels: Vec<usize>,
    num_classes: usize,
    series_length: usize,
    label_map: LabelMap,
}

impl Dataset {
    /// Assembles a dataset from already-contiguous labels in `1..=num_classes`.
    pub fn new(instances: Vec<TimeSeries>, labels: Vec<usize>, label_map: LabelMap) -> Result<Self> {
        if instances.is_empty() {
            return Err(TsfError::EmptyDataset);
        }
        if labels.len() != instances.len() {
            return Err(TsfError::LengthMismatch {
                what: "label list",
                expected: instances.len(),
                found: labels.len(),
            });
        }
        let series_length = instances[0].len();
        for series in &instances {
            if series.len() != series_length {
                return Err(TsfError::LengthMismatch {
                    what: "series",
                    expected: series_length,
                    found: series.len(),
                });
            }
        }
        let num_classes = label_map.num_classes();
        for (index, &label) in labels.iter().enumerate() {
            if label < 1 || label > num_classes {
                return Err(TsfError::InvalidLabel {
                    index,
                    label: label as i64,
                });
            }
        }
        Ok(Dataset {
            instances,
            labels,
            num_classes,
            series_length,
            label_map,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn instances(&self) -> &[TimeSeries] {
        &self.instances
    }

    pub fn instance(&self, i: usize) -> &TimeSeries {
        &self.instances[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn label_map(&self) -> &LabelMap {
        &self.label_map
    }

    /// Instance count per class; index 0 is class 1.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &label in &self.labels {
            counts[label - 1] += 1;
        }
        counts
    }

    /// A new dataset holding the instances at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        Dataset::new(
            indices.iter().map(|&i| self.instances[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.label_map.clone(),
        )
    }
}

/// Checks raw input and builds a [`Dataset`].
///
/// Labels must already be 1-based; `C` is the largest label seen. No
/// normalization or relabelling is applied, so every value and label reads
/// back exactly as given.
pub fn validate_dataset(raw_instances: Vec<Vec<f64>>, raw_labels: Vec<i64>) -> Result<Dataset> {
    if raw_instances.is_empty() || raw_labels.is_empty() {
        return Err(TsfError::EmptyDataset);
    }
    if raw_instances.len() != raw_labels.len() {
        return Err(TsfError::LengthMismatch {
            what: "label list",
            expected: raw_instances.len(),
            found: raw_labels.len(),
        });
    }
    let length = raw_instances[0].len();
    let mut instances = Vec::with_capacity(raw_instances.len());
    for (i, values) in raw_instances.into_iter().enumerate() {
        if values.len() != length {
            return Err(TsfError::LengthMismatch {
                what: "series",
                expected: length,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(TsfError::NonFiniteValue {
                instance: i,
                t: pos + 1,
            });
        }
        instances.push(TimeSeries::new(values)?);
    }
    let mut labels = Vec::with_capacity(raw_labels.len());
    for (index, &label) in raw_labels.iter().enumerate() {
        if label < 1 {
            return Err(TsfError::InvalidLabel { index, label });
        }
        labels.push(label as usize);
    }
    let num_classes = *labels.iter().max().expect("non-empty");
    Dataset::new(instances, labels, LabelMap::identity(num_classes))
}
