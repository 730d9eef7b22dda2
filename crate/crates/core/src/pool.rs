//! Example pool: immutable packed inputs and labels plus one shared vote
//! tally per (example, bank).
//!
//! A tally is only ever changed through an atomic add, and each add is the
//! signed difference between a clause's new output and the output bit the
//! clause recorded for that example. Tallies therefore always equal the
//! polarity-weighted sum of the recorded bits, whatever the interleaving.

use std::sync::atomic::{AtomicI32, Ordering};

use crate::clause::{ClassBank, Clause, EvalMode};
use crate::data::{BinaryDataset, Labels};
use crate::error::{Error, Result};
use crate::literals::{pack_into, word_count};

/// The per-bank learning target of one example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `y' = 1` when the example belongs to the bank's class.
    Class(bool),
    /// Regression target scaled to `0..=T`.
    Scaled(i32),
}

#[derive(Debug, Clone)]
enum Targets {
    Classes { labels: Vec<u32>, single_bank: bool },
    Scaled(Vec<i32>),
}

#[derive(Debug)]
pub struct ExamplePool {
    n_features: usize,
    words: usize,
    literals: Vec<u64>,
    targets: Targets,
    banks: usize,
    tallies: Vec<AtomicI32>,
}

impl ExamplePool {
    /// Classification pool with one tally per bank. A single bank means a
    /// binary machine where label 1 is the positive class.
    pub fn classification(data: &BinaryDataset, banks: usize) -> Result<Self> {
        let labels = match data.labels() {
            Labels::Classes(l) => l.clone(),
            Labels::Targets(_) => {
                return Err(Error::Input(
                    "classification pool needs class labels".into(),
                ))
            }
        };
        if banks == 0 {
            return Err(Error::Input("pool needs at least one bank".into()));
        }
        let limit = if banks == 1 { 2 } else { banks as u32 };
        if let Some(bad) = labels.iter().find(|&&l| l >= limit) {
            return Err(Error::Input(format!(
                "label {bad} out of range for {limit} classes"
            )));
        }
        Ok(Self::build(
            data,
            Targets::Classes {
                labels,
                single_bank: banks == 1,
            },
            banks,
        ))
    }

    /// Regression pool with targets scaled to `round((y - y_min) * T / (y_max - y_min))`.
    pub fn regression(data: &BinaryDataset, y_min: f64, y_max: f64, margin: u32) -> Result<Self> {
        let ys = match data.labels() {
            Labels::Targets(t) => t,
            Labels::Classes(_) => {
                return Err(Error::Input("regression pool needs real targets".into()))
            }
        };
        let scaled = ys
            .iter()
            .map(|&y| scale_target(y, y_min, y_max, margin))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(data, Targets::Scaled(scaled), 1))
    }

    fn build(data: &BinaryDataset, targets: Targets, banks: usize) -> Self {
        let o = data.n_features();
        let words = word_count(o);
        let q = data.len();
        let mut literals = vec![0u64; q * words];
        for i in 0..q {
            pack_into(data.row(i), &mut literals[i * words..(i + 1) * words]);
        }
        Self {
            n_features: o,
            words,
            literals,
            targets,
            banks,
            tallies: (0..q * banks).map(|_| AtomicI32::new(0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.targets {
            Targets::Classes { labels, .. } => labels.len(),
            Targets::Scaled(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn is_classification(&self) -> bool {
        matches!(self.targets, Targets::Classes { .. })
    }

    pub fn banks(&self) -> usize {
        self.banks
    }

    #[inline]
    pub fn literals(&self, i: usize) -> &[u64] {
        &self.literals[i * self.words..(i + 1) * self.words]
    }

    /// Class label of example `i`, or `None` for regression pools.
    pub fn label(&self, i: usize) -> Option<u32> {
        match &self.targets {
            Targets::Classes { labels, .. } => Some(labels[i]),
            Targets::Scaled(_) => None,
        }
    }

    #[inline]
    pub fn target(&self, i: usize, bank: usize) -> Target {
        match &self.targets {
            Targets::Classes {
                labels,
                single_bank: true,
            } => Target::Class(labels[i] == 1),
            Targets::Classes { labels, .. } => Target::Class(labels[i] as usize == bank),
            Targets::Scaled(t) => Target::Scaled(t[i]),
        }
    }

    #[inline]
    fn slot(&self, i: usize, bank: usize) -> &AtomicI32 {
        &self.tallies[i * self.banks + bank]
    }

    #[inline]
    pub fn tally(&self, i: usize, bank: usize) -> i32 {
        self.slot(i, bank).load(Ordering::Relaxed)
    }

    /// Indivisible add to one tally.
    #[inline]
    pub fn add_to_tally(&self, i: usize, bank: usize, delta: i32) {
        self.slot(i, bank).fetch_add(delta, Ordering::Relaxed);
    }

    fn check_index(&self, i: usize, bank: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::ExampleIndex {
                index: i,
                len: self.len(),
            });
        }
        if bank >= self.banks {
            return Err(Error::Input(format!(
                "bank {bank} out of range for {} banks",
                self.banks
            )));
        }
        Ok(())
    }

    /// Records `output` as the clause's output on example `i` and adds the
    /// polarity-signed change to the example's tally. Returns true if the
    /// tally was written.
    pub fn record_output_and_tally(
        &self,
        clause: &mut Clause,
        i: usize,
        bank: usize,
        output: bool,
    ) -> Result<bool> {
        self.check_index(i, bank)?;
        if clause.tracked_examples() != self.len() {
            return Err(Error::Input(format!(
                "clause tracks {} examples, pool has {}",
                clause.tracked_examples(),
                self.len()
            )));
        }
        Ok(self.record_unchecked(clause, i, bank, output))
    }

    #[inline]
    pub(crate) fn record_unchecked(
        &self,
        clause: &mut Clause,
        i: usize,
        bank: usize,
        output: bool,
    ) -> bool {
        let previous = clause.previous_output(i);
        if output == previous {
            return false;
        }
        let delta = (output as i32 - previous as i32) * clause.polarity().sign();
        self.add_to_tally(i, bank, delta);
        clause.store_output(i, output);
        true
    }

    /// Recomputes every tally from scratch and resets every clause's
    /// recorded outputs to its current outputs.
    pub fn refresh_tallies(&mut self, banks: &mut [ClassBank]) -> Result<()> {
        if banks.len() != self.banks {
            return Err(Error::Input(format!(
                "pool has {} tally slots per example, got {} banks",
                self.banks,
                banks.len()
            )));
        }
        let q = self.len();
        for tally in &mut self.tallies {
            *tally.get_mut() = 0;
        }
        for (b, bank) in banks.iter_mut().enumerate() {
            for clause in bank.clauses_mut() {
                clause.reset_outputs(q);
                for i in 0..q {
                    let lits = &self.literals[i * self.words..(i + 1) * self.words];
                    if clause.evaluate(lits, EvalMode::Train) {
                        clause.store_output(i, true);
                        *self.tallies[i * self.banks + b].get_mut() += clause.polarity().sign();
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-evaluates every clause on every example and records the result
    /// through the usual delta path. Once clause states stop changing, one
    /// pass leaves every tally equal to the exact vote sum. Returns the number
    /// of tally writes.
    pub fn delta_pass(&mut self, banks: &mut [ClassBank]) -> Result<usize> {
        if banks.len() != self.banks {
            return Err(Error::Input(format!(
                "pool has {} tally slots per example, got {} banks",
                self.banks,
                banks.len()
            )));
        }
        self.bind(banks);
        let mut writes = 0;
        for (b, bank) in banks.iter_mut().enumerate() {
            for clause in bank.clauses_mut() {
                for i in 0..self.len() {
                    let output = clause.evaluate(self.literals(i), EvalMode::Train);
                    writes += self.record_unchecked(clause, i, b, output) as usize;
                }
            }
        }
        Ok(writes)
    }

    /// Zeroes every tally and every clause's recorded outputs.
    pub fn reset_tallies(&mut self, banks: &mut [ClassBank]) {
        for tally in &mut self.tallies {
            *tally.get_mut() = 0;
        }
        let q = self.len();
        for bank in banks {
            for clause in bank.clauses_mut() {
                clause.reset_outputs(q);
            }
        }
    }

    /// Makes sure every clause tracks exactly this pool's examples; clauses
    /// that do not are reset together with all tallies.
    pub(crate) fn bind(&mut self, banks: &mut [ClassBank]) {
        let q = self.len();
        let bound = banks
            .iter()
            .flat_map(|b| b.clauses())
            .all(|c| c.tracked_examples() == q);
        if !bound {
            self.reset_tallies(banks);
        }
    }
}

/// Free-function form of [`ClassBank::vote_sum`].
pub fn vote_sum(bank: &ClassBank, lits: &[u64], mode: EvalMode) -> i32 {
    bank.vote_sum(lits, mode)
}

pub(crate) fn scale_target(y: f64, y_min: f64, y_max: f64, margin: u32) -> Result<i32> {
    if !(y_max > y_min) {
        return Err(Error::Input(format!(
            "target range [{y_min}, {y_max}] is empty"
        )));
    }
    if !(y >= y_min && y <= y_max) {
        return Err(Error::Input(format!(
            "target {y} outside [{y_min}, {y_max}]"
        )));
    }
    Ok(((y - y_min) * margin as f64 / (y_max - y_min)).round() as i32)
}
