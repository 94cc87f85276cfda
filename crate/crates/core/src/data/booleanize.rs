//! Quantile thermometer booleanization of real-valued features.
//!
//! Each feature gets `bins` thresholds at the `q/(bins+1)` quantiles of its
//! full-dataset distribution; bit `j` of the encoding is `value > threshold_j`.
//! Thresholds ascend, so every row's bit group is a monotone prefix of ones
//! (thermometer code). Thresholds are computed once over the whole dataset
//! and frozen into the emitted file, keeping the encoding out of the set of
//! experimental variables. A constant feature yields equal thresholds and
//! all-zero bits.

use std::path::Path;

use super::dataset::{Datapoint, Dataset};
use crate::error::{Error, Result};

/// Quantile thresholds at `q/(bins+1)` for `q = 1..=bins`, by linear
/// interpolation between order statistics.
pub fn quantile_thresholds(values: &[f64], bins: usize) -> Vec<f64> {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN features"));
    let n = sorted.len();
    (1..=bins)
        .map(|q| {
            let p = q as f64 / (bins + 1) as f64;
            let h = p * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        })
        .collect()
}

/// Booleanizes a raw matrix (rows = samples, columns = features) into
/// `features * bins` thermometer bits per row.
pub fn booleanize_quantile(raw: &[Vec<f64>], bins: usize) -> Result<Vec<Vec<bool>>> {
    if bins == 0 {
        return Err(Error::Input("bins must be >= 1".into()));
    }
    if raw.is_empty() {
        return Err(Error::Input("raw matrix is empty".into()));
    }
    let width = raw[0].len();
    if width == 0 || raw.iter().any(|r| r.len() != width) {
        return Err(Error::Input(
            "raw matrix rows must share a positive width".into(),
        ));
    }

    let thresholds: Vec<Vec<f64>> = (0..width)
        .map(|f| {
            let column: Vec<f64> = raw.iter().map(|r| r[f]).collect();
            quantile_thresholds(&column, bins)
        })
        .collect();

    Ok(raw
        .iter()
        .map(|row| {
            let mut bits = Vec::with_capacity(width * bins);
            for (f, &value) in row.iter().enumerate() {
                bits.extend(thresholds[f].iter().map(|&t| value > t));
            }
            bits
        })
        .collect())
}

/// Raw-feature CSV: each row is floats then a decimal class label, no header.
pub fn load_raw_csv(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    parse_raw_csv(&std::fs::read_to_string(path)?)
}

pub fn parse_raw_csv(text: &str) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected at least one feature and a label".into(),
            });
        }
        let (label, feats) = fields.split_last().unwrap();
        let row: Vec<f64> = feats
            .iter()
            .map(|s| {
                s.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid feature value '{s}'"),
                })
            })
            .collect::<Result<_>>()?;
        let label: usize = label.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid label '{label}'"),
        })?;
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "raw CSV contains no rows".into(),
        });
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Parse {
            line: 1,
            msg: "raw CSV rows have inconsistent widths".into(),
        });
    }
    Ok((rows, labels))
}

/// Full conversion: raw matrix + labels to a canonical boolean dataset.
pub fn booleanize_dataset(raw: &[Vec<f64>], labels: &[usize], bins: usize) -> Result<Dataset> {
    if raw.len() != labels.len() {
        return Err(Error::Input(format!(
            "{} rows but {} labels",
            raw.len(),
            labels.len()
        )));
    }
    let bits = booleanize_quantile(raw, bins)?;
    let num_features = bits[0].len();
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    Ok(Dataset {
        points: bits
            .into_iter()
            .zip(labels)
            .map(|(features, &label)| Datapoint { features, label })
            .collect(),
        num_features,
        num_classes,
    })
}
