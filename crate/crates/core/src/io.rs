//! UCR-style delimited text files.
//!
//! One series per line, class label in the first field. Fields are separated
//! by commas if the first data line contains one, otherwise by whitespace.
//! Blank lines and lines starting with `#` are skipped. Labels may be any
//! integers (written as integers or as integral floats such as `1.0000e+00`)
//! and are mapped to contiguous classes `1..=C` in numeric order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Result, TsfError};
use crate::types::{Dataset, LabelMap, TimeSeries};

pub fn load_ucr(path: &Path) -> Result<Dataset> {
    parse_ucr(&read(path)?, None)
}

/// Loads a file using an existing label mapping, e.g. a test split with the
/// mapping of its training split.
pub fn load_ucr_with_labels(path: &Path, labels: &LabelMap) -> Result<Dataset> {
    parse_ucr(&read(path)?, Some(labels))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| TsfError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_ucr(text: &str, labels: Option<&LabelMap>) -> Result<Dataset> {
    let mut comma: Option<bool> = None;
    let mut width: Option<usize> = None;
    let mut raw_labels = Vec::new();
    let mut rows = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let comma = *comma.get_or_insert_with(|| trimmed.contains(','));
        let fields: Vec<&str> = if comma {
            trimmed.split(',').map(str::trim).collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        let expected = *width.get_or_insert(fields.len());
        if fields.len() != expected {
            return Err(TsfError::RaggedRows {
                line: line_no,
                expected,
                found: fields.len(),
            });
        }
        if fields.len() < 2 {
            return Err(TsfError::Parse {
                line: line_no,
                column: 1,
                message: "a row needs a label and at least one value".into(),
            });
        }
        raw_labels.push(parse_label(fields[0], line_no)?);
        let values = fields[1..]
            .iter()
            .enumerate()
            .map(|(i, f)| parse_value(f, line_no, i + 2))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }

    if rows.is_empty() {
        return Err(TsfError::EmptyFile);
    }
    let map = match labels {
        Some(map) => map.clone(),
        None => LabelMap::from_labels(&raw_labels),
    };
    let classes = raw_labels
        .iter()
        .map(|&l| map.class_of(l))
        .collect::<Result<Vec<_>>>()?;
    let instances = rows
        .into_iter()
        .map(TimeSeries::new)
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(instances, classes, map)
}

fn parse_label(field: &str, line: usize) -> Result<i64> {
    let bad = |message: String| TsfError::Parse {
        line,
        column: 1,
        message,
    };
    if let Ok(v) = field.parse::<i64>() {
        return Ok(v);
    }
    let v: f64 = field
        .parse()
        .map_err(|_| bad(format!("label {field:?} is not a number")))?;
    if !v.is_finite() || v.fract() != 0.0 || v.abs() > 9.0e15 {
        return Err(bad(format!("label {field:?} is not an integer")));
    }
    Ok(v as i64)
}

fn parse_value(field: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| TsfError::Parse {
        line,
        column,
        message: format!("{field:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(TsfError::Parse {
            line,
            column,
            message: format!("{field:?} is not finite"),
        });
    }
    Ok(v)
}

/// Formats a dataset as comma-separated UCR text with its source labels,
/// optionally preceded by a `#` manifest line. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn format_ucr(data: &Dataset, manifest: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(m) = manifest {
        for line in m.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for (series, &class) in data.instances().iter().zip(data.labels()) {
        let _ = write!(out, "{}", data.label_map().original_of(class));
        for v in series.values() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn save_ucr(data: &Dataset, manifest: Option<&str>, path: &Path) -> Result<()> {
    fs::write(path, format_ucr(data, manifest)).map_err(|source| TsfError::Io {
        path: path.to_path_buf(),
        source,
    })
}
