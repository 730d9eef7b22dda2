use std::path::Path;

use super::dense::LabelKind;
use super::Labels;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Binary,
    Continuous,
}

/// Rectangular table of real-valued features plus a label column.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    names: Vec<String>,
    kinds: Vec<ColumnKind>,
    values: Vec<f64>,
    labels: Vec<f64>,
}

impl RawDataset {
    /// `rows` are feature vectors, all of the same width.
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let width = names.len();
        if rows.len() != labels.len() {
            return Err(Error::Input(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Input(format!(
                    "row {i} has {} values, expected {width}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        let q = rows.len();
        let kinds = (0..width)
            .map(|c| {
                if (0..q).all(|i| matches!(values[i * width + c], v if v == 0.0 || v == 1.0)) {
                    ColumnKind::Binary
                } else {
                    ColumnKind::Continuous
                }
            })
            .collect();
        Ok(Self {
            names,
            kinds,
            values,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_columns(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    #[inline]
    pub fn value(&self, i: usize, c: usize) -> f64 {
        self.values[i * self.names.len() + c]
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.value(i, c))
    }

    pub fn raw_labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn labels(&self, kind: LabelKind) -> Result<Labels> {
        match kind {
            LabelKind::Real => Ok(Labels::Targets(self.labels.clone())),
            LabelKind::Class => self
                .labels
                .iter()
                .map(|&y| {
                    if y >= 0.0 && y.fract() == 0.0 && y <= u32::MAX as f64 {
                        Ok(y as u32)
                    } else {
                        Err(Error::Input(format!("label {y} is not a class index")))
                    }
                })
                .collect::<Result<Vec<_>>>()
                .map(Labels::Classes),
        }
    }

    /// Rows `idx`, keeping the column kinds of `self`.
    pub fn select(&self, idx: &[usize]) -> RawDataset {
        let w = self.names.len();
        let mut values = Vec::with_capacity(idx.len() * w);
        for &i in idx {
            values.extend_from_slice(&self.values[i * w..(i + 1) * w]);
        }
        RawDataset {
            names: self.names.clone(),
            kinds: self.kinds.clone(),
            values,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn split(&self, train_fraction: f64, seed: u64) -> (RawDataset, RawDataset) {
        let idx = super::shuffled_indices(self.len(), seed);
        let cut = ((self.len() as f64 * train_fraction).round() as usize).min(self.len());
        (self.select(&idx[..cut]), self.select(&idx[cut..]))
    }
}

/// Reads a CSV file with a header row. The label is the column named
/// `label`, or the last column; columns in `drop` are ignored.
pub fn load_csv(path: impl AsRef<Path>, label: Option<&str>, drop: &[&str]) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let label_idx = match label {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Input(format!("{}: no column named {name:?}", path.display())))?,
        None => headers
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::Input(format!("{}: empty header", path.display())))?,
    };
    let feature_idx: Vec<usize> = (0..headers.len())
        .filter(|&c| c != label_idx && !drop.contains(&headers[c].as_str()))
        .collect();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let line = n + 2;
        if record.len() != headers.len() {
            return Err(Error::Schema {
                path: path.to_path_buf(),
                line,
                expected: headers.len(),
                actual: record.len(),
            });
        }
        let parse = |c: usize| -> Result<f64> {
            record[c].parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("column {:?}: invalid number {:?}", headers[c], &record[c]),
            })
        };
        rows.push(
            feature_idx
                .iter()
                .map(|&c| parse(c))
                .collect::<Result<Vec<_>>>()?,
        );
        labels.push(parse(label_idx)?);
    }
    if rows.is_empty() {
        return Err(Error::EmptyPool(path.to_path_buf()));
    }
    let names = feature_idx.iter().map(|&c| headers[c].clone()).collect();
    RawDataset::new(names, rows, labels)
}
