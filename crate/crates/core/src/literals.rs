//! Bit-packed literal vectors.
//!
//! An input of `o` features expands to `2o` literals: `x_1..x_o` followed by
//! `¬x_1..¬x_o`. Literals are packed 64 per word, padding bits are zero.

use crate::error::{Error, Result};

#[inline]
pub fn word_count(n_features: usize) -> usize {
    (2 * n_features).div_ceil(64)
}

#[inline]
pub(crate) fn bit(words: &[u64], k: usize) -> bool {
    (words[k / 64] >> (k % 64)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], k: usize, value: bool) {
    let mask = 1u64 << (k % 64);
    if value {
        words[k / 64] |= mask;
    } else {
        words[k / 64] &= !mask;
    }
}

/// Reads literal `k` (1-based) of a raw 0/1 feature vector.
pub fn literal_value(x: &[u8], k: usize) -> Result<u8> {
    let o = x.len();
    if k == 0 || k > 2 * o {
        return Err(Error::LiteralIndex {
            index: k,
            max: 2 * o,
        });
    }
    Ok(if k <= o { x[k - 1] } else { 1 - x[k - o - 1] })
}

/// Writes the packed literal encoding of `features` into `out`.
pub(crate) fn pack_into(features: &[u8], out: &mut [u64]) {
    let o = features.len();
    out.fill(0);
    for (f, &v) in features.iter().enumerate() {
        set_bit(out, if v != 0 { f } else { o + f }, true);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literals {
    words: Vec<u64>,
    n_features: usize,
}

impl Literals {
    /// Packs a 0/1 feature vector. Any other value is rejected.
    pub fn from_bits(features: &[u8]) -> Result<Self> {
        if let Some(bad) = features.iter().find(|&&v| v > 1) {
            return Err(Error::Input(format!("feature value {bad} is not binary")));
        }
        let mut words = vec![0; word_count(features.len())];
        pack_into(features, &mut words);
        Ok(Self {
            words,
            n_features: features.len(),
        })
    }

    pub fn from_bools(features: &[bool]) -> Self {
        let bits: Vec<u8> = features.iter().map(|&b| b as u8).collect();
        Self::from_bits(&bits).expect("bools are binary")
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Literal `k` (1-based).
    pub fn literal(&self, k: usize) -> Result<bool> {
        if k == 0 || k > 2 * self.n_features {
            return Err(Error::LiteralIndex {
                index: k,
                max: 2 * self.n_features,
            });
        }
        Ok(bit(&self.words, k - 1))
    }

    pub fn features(&self) -> Vec<u8> {
        (0..self.n_features)
            .map(|f| bit(&self.words, f) as u8)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_value_examples() {
        assert_eq!(literal_value(&[0, 1], 1).unwrap(), 0);
        assert_eq!(literal_value(&[0, 1], 3).unwrap(), 1);
        assert_eq!(literal_value(&[1, 1], 4).unwrap(), 0);
        assert!(matches!(
            literal_value(&[1, 1], 5),
            Err(Error::LiteralIndex { index: 5, max: 4 })
        ));
        assert!(literal_value(&[1, 1], 0).is_err());
    }

    #[test]
    fn packed_matches_raw() {
        let x = [1u8, 0, 0, 1, 1];
        let lits = Literals::from_bits(&x).unwrap();
        for k in 1..=10 {
            assert_eq!(
                lits.literal(k).unwrap() as u8,
                literal_value(&x, k).unwrap()
            );
        }
        assert_eq!(lits.features(), x);
    }

    #[test]
    fn packing_spans_words() {
        let x: Vec<u8> = (0..70).map(|i| (i % 3 == 0) as u8).collect();
        let lits = Literals::from_bits(&x).unwrap();
        assert_eq!(lits.words().len(), 3);
        for k in 1..=140 {
            assert_eq!(
                lits.literal(k).unwrap() as u8,
                literal_value(&x, k).unwrap()
            );
        }
        // padding stays clear
        assert_eq!(lits.words()[2] >> 12, 0);
    }

    #[test]
    fn non_binary_rejected() {
        assert!(Literals::from_bits(&[0, 2]).is_err());
    }
}
