use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::path::Path;

use anyhow::{Context, Result};

pub const HEADER: [&str; 6] = ["dataset", "method", "error", "wall_time_s", "seed", "config"];

/// One dataset x method x seed result.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub dataset: String,
    pub method: String,
    pub error: f64,
    pub wall_time_s: f64,
    /// `None` for methods that take no seed.
    pub seed: Option<u64>,
    pub config: String,
}

impl RunReport {
    fn record(&self) -> [String; 6] {
        [
            self.dataset.clone(),
            self.method.clone(),
            format!("{:.6}", self.error),
            format!("{:.6}", self.wall_time_s),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.config.clone(),
        ]
    }

    /// The report as a single CSV line without a trailing newline.
    pub fn csv_line(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(self.record()).expect("in-memory write");
        let bytes = w.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("utf-8").trim_end().to_string()
    }
}

/// Appends reports to `path`, writing the header first if the file is new
/// or empty.
pub fn append_reports(path: &Path, reports: &[RunReport]) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("cannot open report {}", path.display()))?;
    let fresh = file.metadata().map(|m| m.len() == 0).unwrap_or(true);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let io = |e: csv::Error| anyhow::anyhow!("writing report {}: {e}", path.display());
    if fresh {
        w.write_record(HEADER).map_err(io)?;
    }
    for r in reports {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush().with_context(|| format!("writing report {}", path.display()))?;
    Ok(())
}

/// Average rank of each method over datasets, ranking methods within a
/// dataset by their mean error across seeds. Tied errors share the mean of
/// their ranks.
pub fn average_ranks(reports: &[RunReport]) -> Vec<(String, f64)> {
    let mut per_dataset: BTreeMap<&str, BTreeMap<&str, (f64, usize)>> = BTreeMap::new();
    for r in reports {
        let slot = per_dataset
            .entry(&r.dataset)
            .or_default()
            .entry(&r.method)
            .or_insert((0.0, 0));
        slot.0 += r.error;
        slot.1 += 1;
    }
    let mut totals: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for methods in per_dataset.values() {
        let means: Vec<(&str, f64)> = methods.iter().map(|(m, (s, n))| (*m, s / *n as f64)).collect();
        for &(method, e) in &means {
            let below = means.iter().filter(|(_, o)| *o < e).count();
            let equal = means.iter().filter(|(_, o)| *o == e).count();
            let rank = below as f64 + (equal as f64 + 1.0) / 2.0;
            let t = totals.entry(method).or_insert((0.0, 0));
            t.0 += rank;
            t.1 += 1;
        }
    }
    totals
        .into_iter()
        .map(|(m, (s, n))| (m.to_string(), s / n as f64))
        .collect()
}
