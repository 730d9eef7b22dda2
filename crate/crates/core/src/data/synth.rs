//! Seeded synthetic datasets.

use super::{BinaryDataset, Labels};
use crate::error::{Error, Result};
use crate::feedback::FeedbackRng;

/// `q` rows of uniform `(x1, x2)` with `y = x1 xor x2`, each label flipped
/// with probability `noise_rate`.
pub fn synth_xor(q: usize, noise_rate: f64, seed: u64) -> Result<BinaryDataset> {
    check_noise(noise_rate)?;
    let mut rng = FeedbackRng::new(seed);
    let mut features = Vec::with_capacity(2 * q);
    let mut labels = Vec::with_capacity(q);
    for _ in 0..q {
        let x1 = rng.below(2) as u8;
        let x2 = rng.below(2) as u8;
        features.extend_from_slice(&[x1, x2]);
        let y = (x1 ^ x2) as u32;
        labels.push(if rng.chance(noise_rate) { 1 - y } else { y });
    }
    BinaryDataset::new(2, features, Labels::Classes(labels))
}

/// `q` rows of `o` uniform bits with target `y = popcount(X)`.
pub fn synth_staircase(q: usize, o: usize, seed: u64) -> Result<BinaryDataset> {
    if o == 0 {
        return Err(Error::Input("staircase needs at least one feature".into()));
    }
    let mut rng = FeedbackRng::new(seed);
    let mut features = Vec::with_capacity(o * q);
    let mut targets = Vec::with_capacity(q);
    for _ in 0..q {
        let mut ones = 0;
        for _ in 0..o {
            let b = rng.below(2) as u8;
            ones += b as u32;
            features.push(b);
        }
        targets.push(ones as f64);
    }
    BinaryDataset::new(o, features, Labels::Targets(targets))
}

fn check_noise(noise_rate: f64) -> Result<()> {
    if !(0.0..0.5).contains(&noise_rate) {
        return Err(Error::Input(format!(
            "noise rate must be in [0, 0.5), got {noise_rate}"
        )));
    }
    Ok(())
}

/// Multi-class task where each class owns a few planted conjunctive patterns.
///
/// A sample of class `c` is uniform noise with one of `c`'s patterns planted,
/// redrawn until no other class's pattern matches, so every row has a
/// unique consistent label.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternTask {
    n_features: usize,
    /// Per class, per pattern: `(feature, required value)` pairs.
    patterns: Vec<Vec<Vec<(usize, u8)>>>,
}

impl PatternTask {
    pub fn new(
        n_features: usize,
        n_classes: usize,
        patterns_per_class: usize,
        pattern_len: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_classes < 2 || patterns_per_class == 0 || pattern_len == 0 || pattern_len > n_features
        {
            return Err(Error::Input(format!(
                "invalid pattern task: {n_classes} classes, {patterns_per_class} patterns of \
                 {pattern_len} literals over {n_features} features"
            )));
        }
        let mut rng = FeedbackRng::new(seed);
        let mut patterns = Vec::with_capacity(n_classes);
        for _ in 0..n_classes {
            let mut class = Vec::with_capacity(patterns_per_class);
            for _ in 0..patterns_per_class {
                let mut feats: Vec<usize> = Vec::with_capacity(pattern_len);
                while feats.len() < pattern_len {
                    let f = rng.below(n_features);
                    if !feats.contains(&f) {
                        feats.push(f);
                    }
                }
                class.push(feats.into_iter().map(|f| (f, rng.below(2) as u8)).collect());
            }
            patterns.push(class);
        }
        Ok(Self {
            n_features,
            patterns,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.patterns.len()
    }

    fn matches(&self, class: usize, row: &[u8]) -> bool {
        self.patterns[class]
            .iter()
            .any(|p| p.iter().all(|&(f, v)| row[f] == v))
    }

    /// Draws `q` labelled rows; labels are flipped to a uniformly chosen
    /// other class with probability `noise_rate`.
    pub fn sample(&self, q: usize, noise_rate: f64, seed: u64) -> Result<BinaryDataset> {
        check_noise(noise_rate)?;
        let m = self.n_classes();
        let o = self.n_features;
        let mut rng = FeedbackRng::new(seed);
        let mut features = Vec::with_capacity(q * o);
        let mut labels = Vec::with_capacity(q);
        let mut row = vec![0u8; o];
        for _ in 0..q {
            let class = rng.below(m);
            let mut attempts = 0;
            loop {
                attempts += 1;
                if attempts > 10_000 {
                    return Err(Error::Input(format!(
                        "class {class} patterns always match another class"
                    )));
                }
                row.iter_mut().for_each(|b| *b = rng.below(2) as u8);
                let p = &self.patterns[class][rng.below(self.patterns[class].len())];
                for &(f, v) in p {
                    row[f] = v;
                }
                if (0..m).all(|c| c == class || !self.matches(c, &row)) {
                    break;
                }
            }
            features.extend_from_slice(&row);
            let label = if rng.chance(noise_rate) {
                (class + 1 + rng.below(m - 1)) % m
            } else {
                class
            };
            labels.push(label as u32);
        }
        BinaryDataset::new(o, features, Labels::Classes(labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_labels_without_noise() {
        let d = synth_xor(500, 0.0, 3).unwrap();
        for i in 0..d.len() {
            let r = d.row(i);
            assert_eq!(d.class_labels().unwrap()[i], (r[0] ^ r[1]) as u32);
        }
    }

    #[test]
    fn xor_is_seeded() {
        assert_eq!(
            synth_xor(100, 0.1, 9).unwrap(),
            synth_xor(100, 0.1, 9).unwrap()
        );
        assert_ne!(
            synth_xor(100, 0.1, 9).unwrap(),
            synth_xor(100, 0.1, 10).unwrap()
        );
    }

    #[test]
    fn xor_noise_rate_is_respected() {
        let d = synth_xor(20_000, 0.1, 1).unwrap();
        let flipped = (0..d.len())
            .filter(|&i| d.class_labels().unwrap()[i] != (d.row(i)[0] ^ d.row(i)[1]) as u32)
            .count();
        let rate = flipped as f64 / d.len() as f64;
        assert!((rate - 0.1).abs() < 0.01, "{rate}");
        assert!(synth_xor(10, 0.5, 1).is_err());
        assert!(synth_xor(10, -0.1, 1).is_err());
    }

    #[test]
    fn staircase_targets_count_ones() {
        let d = synth_staircase(200, 6, 4).unwrap();
        for i in 0..d.len() {
            let ones: u32 = d.row(i).iter().map(|&b| b as u32).sum();
            assert_eq!(d.targets().unwrap()[i], ones as f64);
        }
    }

    #[test]
    fn pattern_rows_match_only_their_class() {
        let task = PatternTask::new(20, 4, 2, 3, 11).unwrap();
        let d = task.sample(1000, 0.0, 5).unwrap();
        let labels = d.class_labels().unwrap();
        for i in 0..d.len() {
            let matching: Vec<usize> = (0..4).filter(|&c| task.matches(c, d.row(i))).collect();
            assert_eq!(matching, vec![labels[i] as usize]);
        }
        assert_eq!(d.n_classes(), 4);
    }
}
