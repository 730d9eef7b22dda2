//! Accuracy, macro-F1 and mean absolute error.

use crate::error::{Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a == 0 {
        return Err(Error::Input("metrics need at least one prediction".into()));
    }
    if a != b {
        return Err(Error::Input(format!(
            "{a} predictions for {b} ground-truth values"
        )));
    }
    Ok(())
}

pub fn accuracy(predictions: &[u32], truths: &[u32]) -> Result<f64> {
    check_lengths(predictions.len(), truths.len())?;
    let correct = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| p == t)
        .count();
    Ok(correct as f64 / truths.len() as f64)
}

/// Unweighted mean of per-class F1 over every class that occurs in either
/// the predictions or the truths. A class with no true or predicted
/// positives scores 0.
pub fn macro_f1(predictions: &[u32], truths: &[u32]) -> Result<f64> {
    check_lengths(predictions.len(), truths.len())?;
    let m = predictions
        .iter()
        .chain(truths)
        .copied()
        .max()
        .expect("non-empty") as usize
        + 1;
    let mut tp = vec![0usize; m];
    let mut fp = vec![0usize; m];
    let mut fn_ = vec![0usize; m];
    let mut present = vec![false; m];
    for (&p, &t) in predictions.iter().zip(truths) {
        present[p as usize] = true;
        present[t as usize] = true;
        if p == t {
            tp[p as usize] += 1;
        } else {
            fp[p as usize] += 1;
            fn_[t as usize] += 1;
        }
    }
    let classes: Vec<usize> = (0..m).filter(|&c| present[c]).collect();
    let sum: f64 = classes
        .iter()
        .map(|&c| {
            let denom = 2 * tp[c] + fp[c] + fn_[c];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[c] as f64 / denom as f64
            }
        })
        .sum();
    Ok(sum / classes.len() as f64)
}

pub fn mean_absolute_error(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    check_lengths(predictions.len(), truths.len())?;
    let total: f64 = predictions
        .iter()
        .zip(truths)
        .map(|(p, t)| (p - t).abs())
        .sum();
    Ok(total / truths.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metrics {
    Classification { accuracy: f64, macro_f1: f64 },
    Regression { mae: f64 },
}

pub fn classification_metrics(predictions: &[u32], truths: &[u32]) -> Result<Metrics> {
    Ok(Metrics::Classification {
        accuracy: accuracy(predictions, truths)?,
        macro_f1: macro_f1(predictions, truths)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let t = [0, 1, 2, 1];
        assert_eq!(accuracy(&t, &t).unwrap(), 1.0);
        assert_eq!(macro_f1(&t, &t).unwrap(), 1.0);
    }

    #[test]
    fn all_wrong_binary() {
        assert_eq!(accuracy(&[1, 0, 1], &[0, 1, 0]).unwrap(), 0.0);
        assert_eq!(macro_f1(&[1, 0, 1], &[0, 1, 0]).unwrap(), 0.0);
    }

    #[test]
    fn mae_hand_arithmetic() {
        assert_eq!(mean_absolute_error(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn f1_by_hand() {
        // class 0: tp 1, fp 1, fn 0 -> 2/3; class 1: tp 1, fp 0, fn 1 -> 2/3
        let f1 = macro_f1(&[0, 0, 1], &[0, 1, 1]).unwrap();
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        assert!(accuracy(&[], &[]).is_err());
        assert!(macro_f1(&[], &[]).is_err());
        assert!(mean_absolute_error(&[], &[]).is_err());
        assert!(accuracy(&[1], &[1, 0]).is_err());
    }
}
