//! Datasets, file formats, binarization and synthetic tasks.

mod binarize;
mod dense;
mod raw;
mod synth;

pub use binarize::{apply_binarizer, fit_binarizer, BinarizerSpec, ColumnEncoding};
pub use dense::{load_dense_binary, save_dense_binary, write_dense_binary, LabelKind};
pub use raw::{load_csv, ColumnKind, RawDataset};
pub use synth::{synth_staircase, synth_xor, PatternTask};

use crate::error::{Error, Result};
use crate::feedback::FeedbackRng;

#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    Classes(Vec<u32>),
    Targets(Vec<f64>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Classes(l) => l.len(),
            Labels::Targets(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, idx: &[usize]) -> Labels {
        match self {
            Labels::Classes(l) => Labels::Classes(idx.iter().map(|&i| l[i]).collect()),
            Labels::Targets(t) => Labels::Targets(idx.iter().map(|&i| t[i]).collect()),
        }
    }
}

/// A q x o matrix of 0/1 features with one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    n_features: usize,
    features: Vec<u8>,
    labels: Labels,
}

impl BinaryDataset {
    pub fn new(n_features: usize, features: Vec<u8>, labels: Labels) -> Result<Self> {
        if features.len() != n_features * labels.len() {
            return Err(Error::Input(format!(
                "{} feature values for {} rows of {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if features.iter().any(|&v| v > 1) {
            return Err(Error::Input("features must be 0 or 1".into()));
        }
        Ok(Self {
            n_features,
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn class_labels(&self) -> Option<&[u32]> {
        match &self.labels {
            Labels::Classes(l) => Some(l),
            Labels::Targets(_) => None,
        }
    }

    pub fn targets(&self) -> Option<&[f64]> {
        match &self.labels {
            Labels::Targets(t) => Some(t),
            Labels::Classes(_) => None,
        }
    }

    /// Largest class label plus one (0 for regression data).
    pub fn n_classes(&self) -> usize {
        match &self.labels {
            Labels::Classes(l) => l.iter().max().map_or(0, |&m| m as usize + 1),
            Labels::Targets(_) => 0,
        }
    }

    pub fn select(&self, idx: &[usize]) -> BinaryDataset {
        let mut features = Vec::with_capacity(idx.len() * self.n_features);
        for &i in idx {
            features.extend_from_slice(self.row(i));
        }
        BinaryDataset {
            n_features: self.n_features,
            features,
            labels: self.labels.select(idx),
        }
    }

    /// Seeded shuffle split; the first part holds `round(train_fraction * q)` rows.
    pub fn split(&self, train_fraction: f64, seed: u64) -> (BinaryDataset, BinaryDataset) {
        let idx = shuffled_indices(self.len(), seed);
        let cut = ((self.len() as f64) * train_fraction).round() as usize;
        let cut = cut.min(self.len());
        (self.select(&idx[..cut]), self.select(&idx[cut..]))
    }
}

pub(crate) fn shuffled_indices(q: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..q).collect();
    idx.shuffle(&mut FeedbackRng::new(seed));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(BinaryDataset::new(2, vec![0, 1, 1], Labels::Classes(vec![0, 1])).is_err());
        assert!(BinaryDataset::new(1, vec![3], Labels::Classes(vec![0])).is_err());
    }

    #[test]
    fn split_partitions_rows() {
        let features: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();
        let labels = Labels::Classes((0..10).collect());
        let d = BinaryDataset::new(1, features, labels).unwrap();
        let (a, b) = d.split(0.7, 5);
        assert_eq!((a.len(), b.len()), (7, 3));
        let mut all: Vec<u32> = a
            .class_labels()
            .unwrap()
            .iter()
            .chain(b.class_labels().unwrap())
            .copied()
            .collect();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        for (i, &l) in a.class_labels().unwrap().iter().enumerate() {
            assert_eq!(a.row(i)[0] as u32, l % 2);
        }
    }
}
