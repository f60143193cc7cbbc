//! One-nearest-neighbour baselines: Euclidean distance, DTW without a
//! window, and DTW with a Sakoe-Chiba window chosen by leave-one-out
//! cross-validation on the training set.
//!
//! DTW uses squared local costs and no final square root; the monotone
//! transform leaves every nearest-neighbour decision unchanged.

use rayon::prelude::*;

use crate::error::{Result, TsfError};
use crate::types::{Dataset, TimeSeries};

/// Sakoe-Chiba band radius as a percentage of the series length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WarpingWindow(u8);

impl WarpingWindow {
    /// Unconstrained warping.
    pub const FULL: WarpingWindow = WarpingWindow(100);

    pub fn new(percent: u8) -> Result<Self> {
        if percent > 100 {
            return Err(TsfError::InvalidConfig(format!(
                "warping window {percent}% exceeds 100%"
            )));
        }
        Ok(WarpingWindow(percent))
    }

    pub fn percent(self) -> u8 {
        self.0
    }

    /// Absolute band width `ceil(r M / 100)`.
    pub fn band_width(self, series_length: usize) -> usize {
        (self.0 as usize * series_length).div_ceil(100)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    Dtw(WarpingWindow),
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(TsfError::LengthMismatch {
            what: "series",
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

pub fn euclidean_distance(a: &TimeSeries, b: &TimeSeries) -> Result<f64> {
    check_lengths(a.values(), b.values())?;
    Ok(squared_euclidean(a.values(), b.values(), f64::INFINITY).sqrt())
}

/// Sum of squared differences, abandoned (returning infinity) once it
/// exceeds `cutoff`.
fn squared_euclidean(a: &[f64], b: &[f64], cutoff: f64) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += (x - y) * (x - y);
        if sum > cutoff {
            return f64::INFINITY;
        }
    }
    sum
}

/// Accumulated squared-cost DTW between equal-length series, restricted to
/// `|i - j| <= band width`.
pub fn dtw_distance(a: &TimeSeries, b: &TimeSeries, window: WarpingWindow) -> Result<f64> {
    check_lengths(a.values(), b.values())?;
    Ok(dtw(a.values(), b.values(), window.band_width(a.len()), f64::INFINITY))
}

/// Banded DTW with early abandoning: if every cell of some row exceeds
/// `cutoff`, the final cost must too, and infinity is returned.
fn dtw(a: &[f64], b: &[f64], width: usize, cutoff: f64) -> f64 {
    let m = a.len();
    let w = width.min(m.saturating_sub(1));
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for i in 1..=m {
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(m);
        curr[lo - 1] = f64::INFINITY;
        let mut row_min = f64::INFINITY;
        for j in lo..=hi {
            let d = a[i - 1] - b[j - 1];
            let best = prev[j - 1].min(prev[j]).min(curr[j - 1]);
            let cell = d * d + best;
            curr[j] = cell;
            row_min = row_min.min(cell);
        }
        if hi < m {
            curr[hi + 1] = f64::INFINITY;
        }
        if row_min > cutoff {
            return f64::INFINITY;
        }
        std::mem::swap(&mut prev, &mut curr);
        // prev[0] stays at infinity for all rows after the first
        curr[0] = f64::INFINITY;
    }
    prev[m]
}

/// Distance ranking key: squared Euclidean or DTW cost, with abandoning.
fn ranked_distance(a: &[f64], b: &[f64], metric: Metric, cutoff: f64) -> f64 {
    match metric {
        Metric::Euclidean => squared_euclidean(a, b, cutoff),
        Metric::Dtw(window) => dtw(a, b, window.band_width(a.len()), cutoff),
    }
}

/// Index of the nearest training instance, skipping `exclude`. Ties go to the
/// lowest index: a candidate replaces the incumbent only if strictly closer,
/// and abandoning only discards candidates already known to be farther.
fn nearest(train: &Dataset, query: &[f64], metric: Metric, exclude: Option<usize>) -> Option<usize> {
    let mut best = f64::INFINITY;
    let mut best_index = None;
    for (i, s) in train.instances().iter().enumerate() {
        if Some(i) == exclude {
            continue;
        }
        let d = ranked_distance(s.values(), query, metric, best);
        if best_index.is_none() || d < best {
            best = d;
            best_index = Some(i);
        }
    }
    best_index
}

/// Label of the nearest training instance.
pub fn nn_classify(train: &Dataset, query: &TimeSeries, metric: Metric) -> Result<usize> {
    if query.len() != train.series_length() {
        return Err(TsfError::LengthMismatch {
            what: "query series",
            expected: train.series_length(),
            found: query.len(),
        });
    }
    let i = nearest(train, query.values(), metric, None).expect("training set is non-empty");
    Ok(train.label(i))
}

/// Test error of 1-NN under `metric`.
pub fn nn_error(train: &Dataset, test: &Dataset, metric: Metric) -> Result<f64> {
    if test.series_length() != train.series_length() {
        return Err(TsfError::LengthMismatch {
            what: "test series",
            expected: train.series_length(),
            found: test.series_length(),
        });
    }
    let wrong = (0..test.len())
        .into_par_iter()
        .filter(|&i| {
            let j = nearest(train, test.instance(i).values(), metric, None).expect("non-empty");
            train.label(j) != test.label(i)
        })
        .count();
    Ok(wrong as f64 / test.len() as f64)
}

/// Leave-one-out 1-NN error on the training set.
pub fn loocv_error(train: &Dataset, metric: Metric) -> Result<f64> {
    if train.len() < 2 {
        return Err(TsfError::InvalidConfig(
            "leave-one-out needs at least two instances".into(),
        ));
    }
    let wrong = (0..train.len())
        .into_par_iter()
        .filter(|&i| {
            let j = nearest(train, train.instance(i).values(), metric, Some(i)).expect("N >= 2");
            train.label(j) != train.label(i)
        })
        .count();
    Ok(wrong as f64 / train.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSearch {
    pub window: WarpingWindow,
    /// Leave-one-out error for r = 0, 1, ..., 100.
    pub loocv_errors: Vec<f64>,
}

/// Searches r = 0..=100 for the window with the lowest leave-one-out error;
/// ties go to the smallest r. Percentages mapping to the same effective band
/// share one evaluation.
pub fn best_warping_window(train: &Dataset) -> Result<WindowSearch> {
    let m = train.series_length();
    let mut errors = Vec::with_capacity(101);
    let mut cache: Vec<(usize, f64)> = Vec::new();
    for r in 0..=100u8 {
        let window = WarpingWindow(r);
        let effective = window.band_width(m).min(m.saturating_sub(1));
        let error = match cache.iter().find(|(w, _)| *w == effective) {
            Some(&(_, e)) => e,
            None => {
                let e = loocv_error(train, Metric::Dtw(window))?;
                cache.push((effective, e));
                e
            }
        };
        errors.push(error);
    }
    let mut best = 0;
    for (r, &e) in errors.iter().enumerate() {
        if e < errors[best] {
            best = r;
        }
    }
    Ok(WindowSearch {
        window: WarpingWindow(best as u8),
        loocv_errors: errors,
    })
}
