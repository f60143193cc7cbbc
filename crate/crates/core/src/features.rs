//! Interval features: mean, standard deviation and least-squares slope.
//!
//! The `compute_*` functions evaluate the definitional formulas directly and
//! cost `O(t2 - t1)`. Tree induction and prediction evaluate thousands of
//! intervals per series, so they go through [`SeriesSums`], which answers
//! every feature in `O(1)` from prefix sums built once per series.

use crate::error::Result;
use crate::types::{FeatureKind, Interval, TimeSeries};

/// Arithmetic mean of `v[t1..=t2]`.
pub fn compute_mean(series: &TimeSeries, interval: Interval) -> Result<f64> {
    interval.check(series.len())?;
    Ok(mean_of(series.slice(interval)))
}

/// Sample standard deviation (denominator `t2 - t1`), or 0 for a single point.
pub fn compute_std(series: &TimeSeries, interval: Interval) -> Result<f64> {
    interval.check(series.len())?;
    let values = series.slice(interval);
    if values.len() == 1 {
        return Ok(0.0);
    }
    let mean = mean_of(values);
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((ss / (values.len() - 1) as f64).sqrt())
}

/// Slope of the ordinary least-squares line through `(t, v_t)`, `t1 <= t <= t2`,
/// or 0 for a single point.
pub fn compute_slope(series: &TimeSeries, interval: Interval) -> Result<f64> {
    interval.check(series.len())?;
    let values = series.slice(interval);
    if values.len() == 1 {
        return Ok(0.0);
    }
    let t_mean = (interval.t1 + interval.t2) as f64 / 2.0;
    let v_mean = mean_of(values);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (offset, v) in values.iter().enumerate() {
        let dt = (interval.t1 + offset) as f64 - t_mean;
        sxy += dt * (v - v_mean);
        sxx += dt * dt;
    }
    Ok(sxy / sxx)
}

pub fn compute_feature(kind: FeatureKind, series: &TimeSeries, interval: Interval) -> Result<f64> {
    match kind {
        FeatureKind::Mean => compute_mean(series, interval),
        FeatureKind::StdDev => compute_std(series, interval),
        FeatureKind::Slope => compute_slope(series, interval),
    }
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Prefix sums of one series for constant-time interval features.
///
/// Values are centered on the series mean before accumulation, which keeps
/// the variance and slope numerators well conditioned. Numerators that fall
/// below the accumulated rounding error of the prefix sums are reported as
/// exactly zero, so a flat segment has standard deviation and slope 0 just
/// as with the definitional formulas.
#[derive(Debug, Clone)]
pub struct SeriesSums {
    offset: f64,
    // index t holds the sum over 1..=t; index 0 is zero
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    sum_t: Vec<f64>,
    var_floor: f64,
    slope_floor: f64,
}

impl SeriesSums {
    pub fn new(series: &TimeSeries) -> Self {
        Self::from_values(series.values())
    }

    pub fn from_values(values: &[f64]) -> Self {
        let m = values.len();
        let offset = values.iter().sum::<f64>() / m as f64;
        let mut sum = Vec::with_capacity(m + 1);
        let mut sum_sq = Vec::with_capacity(m + 1);
        let mut sum_t = Vec::with_capacity(m + 1);
        let (mut s, mut s2, mut st, mut abs) = (0.0, 0.0, 0.0, 0.0);
        sum.push(0.0);
        sum_sq.push(0.0);
        sum_t.push(0.0);
        for (i, v) in values.iter().enumerate() {
            let c = v - offset;
            s += c;
            s2 += c * c;
            st += (i + 1) as f64 * c;
            abs += c.abs();
            sum.push(s);
            sum_sq.push(s2);
            sum_t.push(st);
        }
        SeriesSums {
            offset,
            sum,
            sum_sq,
            sum_t,
            var_floor: 16.0 * f64::EPSILON * s2,
            slope_floor: 4.0 * f64::EPSILON * m as f64 * abs,
        }
    }

    pub fn len(&self) -> usize {
        self.sum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mean(&self, interval: Interval) -> f64 {
        let n = interval.len() as f64;
        self.offset + (self.sum[interval.t2] - self.sum[interval.t1 - 1]) / n
    }

    pub fn std(&self, interval: Interval) -> f64 {
        if interval.t1 == interval.t2 {
            return 0.0;
        }
        let n = interval.len() as f64;
        let s = self.sum[interval.t2] - self.sum[interval.t1 - 1];
        let s2 = self.sum_sq[interval.t2] - self.sum_sq[interval.t1 - 1];
        let ss = s2 - s * s / n;
        if ss <= self.var_floor {
            return 0.0;
        }
        (ss / (n - 1.0)).sqrt()
    }

    pub fn slope(&self, interval: Interval) -> f64 {
        if interval.t1 == interval.t2 {
            return 0.0;
        }
        let n = interval.len() as f64;
        let s = self.sum[interval.t2] - self.sum[interval.t1 - 1];
        let st = self.sum_t[interval.t2] - self.sum_t[interval.t1 - 1];
        let t_mean = (interval.t1 + interval.t2) as f64 / 2.0;
        let sxy = st - t_mean * s;
        if sxy.abs() <= self.slope_floor {
            return 0.0;
        }
        // sum of (t - t_mean)^2 over n consecutive integers
        let sxx = n * (n * n - 1.0) / 12.0;
        sxy / sxx
    }

    /// Feature value; `interval` must be valid for this series.
    pub fn feature(&self, kind: FeatureKind, interval: Interval) -> f64 {
        debug_assert!(interval.check(self.len()).is_ok());
        match kind {
            FeatureKind::Mean => self.mean(interval),
            FeatureKind::StdDev => self.std(interval),
            FeatureKind::Slope => self.slope(interval),
        }
    }
}
