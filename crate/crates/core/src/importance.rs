//! Temporal importance curves.
//!
//! For every split node on feature `k` over `[t1, t2]`, the node's recorded
//! entropy gain is added to `Imp_k(t)` at each `t` in the interval. Curves are
//! summed over all trees and are not normalized.

use std::fmt::Write as _;

use crate::error::{Result, TsfError};
use crate::forest::Forest;
use crate::types::FeatureKind;

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceCurves {
    series_length: usize,
    // indexed by FeatureKind::ordinal() - 1, then by t - 1
    curves: [Vec<f64>; 3],
}

impl ImportanceCurves {
    pub fn series_length(&self) -> usize {
        self.series_length
    }

    /// Curve for `kind`; element `t - 1` holds `Imp_kind(t)`.
    pub fn curve(&self, kind: FeatureKind) -> &[f64] {
        &self.curves[kind.ordinal() - 1]
    }

    /// 1-based index of the largest value; the earliest wins ties.
    pub fn argmax(&self, kind: FeatureKind) -> usize {
        let curve = self.curve(kind);
        let mut best = 0;
        for (i, &v) in curve.iter().enumerate() {
            if v > curve[best] {
                best = i;
            }
        }
        best + 1
    }

    /// Each curve divided pointwise by the number of intervals covering `t`,
    /// `t (M - t + 1)`.
    pub fn normalized(&self) -> ImportanceCurves {
        let m = self.series_length;
        let curves = self.curves.clone().map(|c| {
            c.iter()
                .enumerate()
                .map(|(i, v)| v / interval_count_unchecked(i + 1, m) as f64)
                .collect()
        });
        ImportanceCurves {
            series_length: m,
            curves,
        }
    }

    /// CSV with header `t,mean,stddev,slope` and one row per time index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mean,stddev,slope\n");
        for t in 0..self.series_length {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                t + 1,
                self.curves[0][t],
                self.curves[1][t],
                self.curves[2][t]
            );
        }
        out
    }

    /// CSV with the raw curves followed by their normalized counterparts.
    pub fn to_csv_with_normalized(&self) -> String {
        let norm = self.normalized();
        let mut out = String::from("t,mean,stddev,slope,mean_normalized,stddev_normalized,slope_normalized\n");
        for t in 0..self.series_length {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                t + 1,
                self.curves[0][t],
                self.curves[1][t],
                self.curves[2][t],
                norm.curves[0][t],
                norm.curves[1][t],
                norm.curves[2][t]
            );
        }
        out
    }
}

pub fn importance_curves(forest: &Forest) -> ImportanceCurves {
    let m = forest.series_length();
    let mut curves = [vec![0.0; m], vec![0.0; m], vec![0.0; m]];
    for tree in forest.trees() {
        for split in tree.split_nodes() {
            let curve = &mut curves[split.kind.ordinal() - 1];
            for v in &mut curve[split.interval.t1 - 1..split.interval.t2] {
                *v += split.gain;
            }
        }
    }
    ImportanceCurves {
        series_length: m,
        curves,
    }
}

/// Number of intervals `[t1, t2]` within `1..=M` that contain `t`: `t (M - t + 1)`.
pub fn interval_count(t: usize, series_length: usize) -> Result<u64> {
    if t < 1 || t > series_length {
        return Err(TsfError::IndexOutOfRange {
            t,
            length: series_length,
        });
    }
    Ok(interval_count_unchecked(t, series_length))
}

fn interval_count_unchecked(t: usize, m: usize) -> u64 {
    t as u64 * (m - t + 1) as u64
}
