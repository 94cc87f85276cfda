//! Canonical dataset file: a `F=<int> C=<int>` header, then one row per
//! datapoint as `F` characters in `{0,1}`, a comma, and the decimal label.
//! No floats anywhere, so files are byte-reproducible.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Datapoint {
    pub features: Vec<bool>,
    pub label: usize,
}

/// The header of a dataset file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub num_features: usize,
    pub num_classes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Datapoint>,
    pub num_features: usize,
    pub num_classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn parse_dataset(text: &str) -> Result<(Dataset, Manifest)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let manifest = parse_header(header)?;

    let mut points = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (bits, label) = line.split_once(',').ok_or(Error::Parse {
            line: line_no,
            msg: "expected '<bits>,<label>'".into(),
        })?;
        if bits.len() != manifest.num_features {
            return Err(Error::Parse {
                line: line_no,
                msg: format!(
                    "row width {} does not match F={}",
                    bits.len(),
                    manifest.num_features
                ),
            });
        }
        let features: Vec<bool> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: line_no,
                    msg: format!("invalid feature character '{other}'"),
                }),
            })
            .collect::<Result<_>>()?;
        let label: usize = label.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid label '{label}'"),
        })?;
        if label >= manifest.num_classes {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("label {label} out of range (C={})", manifest.num_classes),
            });
        }
        points.push(Datapoint { features, label });
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "dataset contains no rows".into(),
        });
    }
    Ok((
        Dataset {
            points,
            num_features: manifest.num_features,
            num_classes: manifest.num_classes,
        },
        manifest,
    ))
}

fn parse_header(header: &str) -> Result<Manifest> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let mut f = None;
    let mut c = None;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("F=") {
            f = Some(v.parse().map_err(|_| bad(format!("bad F value '{v}'")))?);
        } else if let Some(v) = tok.strip_prefix("C=") {
            c = Some(v.parse().map_err(|_| bad(format!("bad C value '{v}'")))?);
        } else {
            return Err(bad(format!("unexpected header token '{tok}'")));
        }
    }
    match (f, c) {
        (Some(f), Some(c)) if f > 0 && c > 0 => Ok(Manifest {
            num_features: f,
            num_classes: c,
        }),
        _ => Err(bad(
            "header must be 'F=<int> C=<int>' with positive values".into()
        )),
    }
}

pub fn format_dataset(dataset: &Dataset) -> String {
    let mut out = format!("F={} C={}\n", dataset.num_features, dataset.num_classes);
    for p in &dataset.points {
        for &bit in &p.features {
            out.push(if bit { '1' } else { '0' });
        }
        out.push(',');
        out.push_str(&p.label.to_string());
        out.push('\n');
    }
    out
}

pub fn load_dataset(path: &Path) -> Result<(Dataset, Manifest)> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, format_dataset(dataset))?;
    Ok(())
}
