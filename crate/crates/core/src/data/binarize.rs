//! Quantile thresholding of continuous columns.
//!
//! A continuous value `x` becomes one bit per threshold, `[x > threshold]`.
//! Thresholds sit at the `b / (B + 1)` quantiles (linear interpolation) of
//! the fitting rows, deduplicated, and never at or above the column maximum.

use serde::{Deserialize, Serialize};

use super::raw::RawDataset;
use super::{dense::LabelKind, BinaryDataset};
use crate::error::{Error, Result};

pub const BINARIZER_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnEncoding {
    /// 0/1 column copied through as one bit.
    Binary,
    /// Strictly ascending thresholds in feature units.
    Thresholds { thresholds: Vec<f64> },
}

impl ColumnEncoding {
    pub fn width(&self) -> usize {
        match self {
            ColumnEncoding::Binary => 1,
            ColumnEncoding::Thresholds { thresholds } => thresholds.len(),
        }
    }

    fn encode(&self, x: f64, out: &mut Vec<u8>) {
        match self {
            ColumnEncoding::Binary => out.push((x > 0.5) as u8),
            ColumnEncoding::Thresholds { thresholds } => {
                out.extend(thresholds.iter().map(|&t| (x > t) as u8))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarizerSpec {
    pub version: u32,
    pub bits_per_feature: usize,
    pub names: Vec<String>,
    pub columns: Vec<ColumnEncoding>,
}

impl BinarizerSpec {
    pub fn width(&self) -> usize {
        self.columns.iter().map(ColumnEncoding::width).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: BinarizerSpec = serde_json::from_str(text)?;
        if spec.version != BINARIZER_VERSION {
            return Err(Error::Format(format!(
                "unsupported binarizer version {}",
                spec.version
            )));
        }
        for col in &spec.columns {
            if let ColumnEncoding::Thresholds { thresholds } = col {
                if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Format(
                        "thresholds must be strictly ascending".into(),
                    ));
                }
            }
        }
        Ok(spec)
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn fit_column(name: &str, mut values: Vec<f64>, bits: usize) -> ColumnEncoding {
    values.sort_by(f64::total_cmp);
    let min = values[0];
    let max = values[values.len() - 1];
    if min == max {
        log::warn!("column {name:?} is constant; encoding it as all zeros");
        return ColumnEncoding::Thresholds {
            thresholds: vec![min],
        };
    }
    let mut thresholds: Vec<f64> = Vec::with_capacity(bits);
    for b in 1..=bits {
        let t = quantile(&values, b as f64 / (bits + 1) as f64);
        if t < max && thresholds.last().is_none_or(|&last| t > last) {
            thresholds.push(t);
        }
    }
    if thresholds.is_empty() {
        // every quantile landed on the maximum
        let below = values
            .iter()
            .rev()
            .find(|&&v| v < max)
            .copied()
            .unwrap_or(min);
        thresholds.push(below);
    }
    ColumnEncoding::Thresholds { thresholds }
}

pub fn fit_binarizer(data: &RawDataset, bits_per_feature: usize) -> Result<BinarizerSpec> {
    if bits_per_feature == 0 {
        return Err(Error::Config("bits per feature must be >= 1".into()));
    }
    if data.is_empty() {
        return Err(Error::Input("cannot fit a binarizer on zero rows".into()));
    }
    let columns = (0..data.n_columns())
        .map(|c| {
            // kinds are re-derived from the fitting rows alone
            if data.column(c).all(|v| v == 0.0 || v == 1.0) {
                ColumnEncoding::Binary
            } else {
                fit_column(&data.names()[c], data.column(c).collect(), bits_per_feature)
            }
        })
        .collect();
    Ok(BinarizerSpec {
        version: BINARIZER_VERSION,
        bits_per_feature,
        names: data.names().to_vec(),
        columns,
    })
}

pub fn apply_binarizer(
    spec: &BinarizerSpec,
    data: &RawDataset,
    labels: LabelKind,
) -> Result<BinaryDataset> {
    if spec.columns.len() != data.n_columns() {
        return Err(Error::Dimension {
            expected: spec.columns.len(),
            actual: data.n_columns(),
        });
    }
    let width = spec.width();
    let mut features = Vec::with_capacity(width * data.len());
    for i in 0..data.len() {
        for (c, col) in spec.columns.iter().enumerate() {
            col.encode(data.value(i, c), &mut features);
        }
    }
    BinaryDataset::new(width, features, data.labels(labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_column(values: Vec<f64>) -> RawDataset {
        let labels = vec![0.0; values.len()];
        RawDataset::new(
            vec!["x".into()],
            values.into_iter().map(|v| vec![v]).collect(),
            labels,
        )
        .unwrap()
    }

    /// Percentile by sorting and nearest-rank lookup.
    fn nearest_rank(values: &[f64], pct: f64) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let rank = ((pct / 100.0) * v.len() as f64).ceil() as usize;
        v[rank.max(1) - 1]
    }

    #[test]
    fn uniform_column_three_bits() {
        let values: Vec<f64> = (0..100).map(f64::from).collect();
        let raw = single_column(values.clone());
        let spec = fit_binarizer(&raw, 3).unwrap();
        let ColumnEncoding::Thresholds { thresholds } = &spec.columns[0] else {
            panic!("continuous column expected")
        };
        assert_eq!(thresholds.len(), 3);
        for (t, pct) in thresholds.iter().zip([25.0, 50.0, 75.0]) {
            assert!(
                (t - nearest_rank(&values, pct)).abs() <= 1.0,
                "{t} vs {pct}th"
            );
        }
        let probe = single_column(vec![60.0, 99.0, 0.0]);
        let bits = apply_binarizer(&spec, &probe, LabelKind::Class).unwrap();
        assert_eq!(bits.row(0), &[1, 1, 0]);
        assert_eq!(bits.row(1), &[1, 1, 1]);
        assert_eq!(bits.row(2), &[0, 0, 0]);
    }

    #[test]
    fn extremes_map_to_all_ones_and_zeros() {
        let values = vec![3.0, 3.0, 3.0, 3.0, 4.0, 7.5, 9.0, 9.0, 9.0, 9.0, 9.0];
        let raw = single_column(values);
        let spec = fit_binarizer(&raw, 8).unwrap();
        let w = spec.width();
        let bits =
            apply_binarizer(&spec, &single_column(vec![9.0, 3.0]), LabelKind::Class).unwrap();
        assert_eq!(bits.row(0), vec![1; w]);
        assert_eq!(bits.row(1), vec![0; w]);
    }

    #[test]
    fn constant_column_encodes_zero() {
        let raw = RawDataset::new(
            vec!["c".into(), "v".into()],
            vec![vec![5.0, 0.2], vec![5.0, 0.7], vec![5.0, 0.9]],
            vec![0.0; 3],
        )
        .unwrap();
        let spec = fit_binarizer(&raw, 4).unwrap();
        let bits = apply_binarizer(&spec, &raw, LabelKind::Class).unwrap();
        for i in 0..3 {
            assert_eq!(bits.row(i)[0], 0);
        }
    }

    #[test]
    fn binary_columns_pass_through() {
        let raw = RawDataset::new(
            vec!["b".into()],
            vec![vec![0.0], vec![1.0], vec![1.0]],
            vec![1.0, 0.0, 1.0],
        )
        .unwrap();
        let spec = fit_binarizer(&raw, 8).unwrap();
        assert_eq!(spec.columns, vec![ColumnEncoding::Binary]);
        let bits = apply_binarizer(&spec, &raw, LabelKind::Class).unwrap();
        assert_eq!(bits.n_features(), 1);
        assert_eq!(bits.row(1), &[1]);
    }

    #[test]
    fn fit_ignores_test_rows() {
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|i| vec![(i * 7 % 101) as f64, (i % 13) as f64])
            .collect();
        let names = vec!["a".to_string(), "b".to_string()];
        let raw = RawDataset::new(names.clone(), rows.clone(), vec![0.0; 200]).unwrap();
        let (train, _) = raw.split(0.75, 3);
        let spec = fit_binarizer(&train, 8).unwrap();

        // same split, but every held-out row replaced by extreme values
        let idx = crate::data::shuffled_indices(200, 3);
        let mut poisoned_rows = rows;
        for &i in &idx[150..] {
            poisoned_rows[i] = vec![1e9, -1e9];
        }
        let poisoned = RawDataset::new(names, poisoned_rows, vec![0.0; 200]).unwrap();
        let (poisoned_train, poisoned_test) = poisoned.split(0.75, 3);
        assert!((0..poisoned_test.len()).all(|i| poisoned_test.value(i, 0) == 1e9));
        assert_eq!(fit_binarizer(&poisoned_train, 8).unwrap(), spec);
        assert_ne!(fit_binarizer(&poisoned, 8).unwrap(), spec);
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let raw = single_column((0..50).map(f64::from).collect());
        let spec = fit_binarizer(&raw, 8).unwrap();
        let text = spec.to_json().unwrap();
        assert_eq!(BinarizerSpec::from_json(&text).unwrap(), spec);
        let bumped = text.replace("\"version\": 1", "\"version\": 9");
        assert!(BinarizerSpec::from_json(&bumped).is_err());
    }

    #[test]
    fn zero_bits_rejected() {
        let raw = single_column(vec![1.0, 2.0]);
        assert!(fit_binarizer(&raw, 0).is_err());
    }
}
