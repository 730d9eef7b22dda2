//! Training and inference for multi-class machines.
//!
//! Two training schedules share the same feedback rules:
//!
//! * [`sequential`]: the classical loop. Each example's vote sum is computed
//!   fresh from every clause of the bank before any clause is updated.
//! * [`parallel`]: every clause is trained independently against the
//!   example pool's recorded vote tallies. Workers own disjoint clauses and
//!   only meet on atomic tally adds; the epoch end is the one barrier.

pub mod parallel;
pub mod sequential;

use serde::{Deserialize, Serialize};

use crate::clause::{ClassBank, Clause, EvalMode};
use crate::config::TMConfig;
use crate::error::{Error, Result};
use crate::feedback::{
    clause_update_probability, type_i_feedback, type_ii_feedback, FeedbackRng, Specificity,
};
use crate::literals::Literals;
use crate::pool::{ExamplePool, Target};

pub use parallel::train_epoch_parallel;
pub use sequential::train_epoch_sequential;

/// Summary of one training epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub epoch: usize,
    /// Wall-clock seconds spent in the epoch itself.
    pub seconds: f64,
    /// Accuracy for classification, MAE for regression.
    pub train_metric: Option<f64>,
    pub test_metric: Option<f64>,
    /// Per bank, the number of clauses whose include set changed.
    pub changed_clauses: Vec<usize>,
    /// Clause updates that passed the margin gate.
    pub feedback_events: u64,
    pub tally_writes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FeedbackKind {
    TypeI,
    TypeII,
}

/// Gate probability and feedback type for one clause on one example.
#[inline]
pub(crate) fn feedback_plan(
    target: Target,
    votes: i32,
    margin: u32,
    positive: bool,
) -> (f64, FeedbackKind) {
    match target {
        Target::Class(y) => {
            let p = clause_update_probability(votes, y, margin);
            let kind = if y ^ positive {
                FeedbackKind::TypeII
            } else {
                FeedbackKind::TypeI
            };
            (p, kind)
        }
        Target::Scaled(t) => {
            let v = votes.clamp(0, margin as i32);
            let err = (t - v).unsigned_abs() as f64;
            let p = (err / (2.0 * margin as f64)).min(1.0);
            let kind = if v < t {
                FeedbackKind::TypeI
            } else {
                FeedbackKind::TypeII
            };
            (p, kind)
        }
    }
}

#[inline]
pub(crate) fn give_feedback(
    clause: &mut Clause,
    lits: &[u64],
    kind: FeedbackKind,
    spec: &Specificity,
    rng: &mut FeedbackRng,
) {
    match kind {
        FeedbackKind::TypeI => {
            type_i_feedback(clause, lits, spec, rng);
        }
        FeedbackKind::TypeII => {
            type_ii_feedback(clause, lits);
        }
    }
}

/// Counters from [`update_clause`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub visited: u64,
    pub feedback_events: u64,
    pub tally_writes: u64,
}

impl std::ops::AddAssign for UpdateStats {
    fn add_assign(&mut self, o: Self) {
        self.visited += o.visited;
        self.feedback_events += o.feedback_events;
        self.tally_writes += o.tally_writes;
    }
}

/// Trains one clause of bank `bank` on the examples `order`, using and
/// maintaining the pool's recorded vote tallies.
///
/// For every example: the tally gates the update, the polarity and target
/// pick Type I or Type II, and after feedback the clause's fresh output is
/// recorded with its tally delta.
pub fn update_clause(
    clause: &mut Clause,
    pool: &ExamplePool,
    bank: usize,
    order: impl IntoIterator<Item = usize>,
    margin: u32,
    spec: &Specificity,
    rng: &mut FeedbackRng,
) -> Result<UpdateStats> {
    if clause.tracked_examples() != pool.len() {
        return Err(Error::Input(format!(
            "clause tracks {} examples, pool has {}",
            clause.tracked_examples(),
            pool.len()
        )));
    }
    if bank >= pool.banks() {
        return Err(Error::Input(format!("bank {bank} out of range")));
    }
    if clause.n_features() != pool.n_features() {
        return Err(Error::Dimension {
            expected: pool.n_features(),
            actual: clause.n_features(),
        });
    }
    let q = pool.len();
    let checked = order.into_iter().map(|i| {
        if i < q {
            Ok(i)
        } else {
            Err(Error::ExampleIndex { index: i, len: q })
        }
    });
    let mut stats = UpdateStats::default();
    for i in checked {
        stats += update_on_example(clause, pool, bank, i?, margin, spec, rng);
    }
    Ok(stats)
}

#[inline]
pub(crate) fn update_on_example(
    clause: &mut Clause,
    pool: &ExamplePool,
    bank: usize,
    i: usize,
    margin: u32,
    spec: &Specificity,
    rng: &mut FeedbackRng,
) -> UpdateStats {
    let mut stats = UpdateStats {
        visited: 1,
        ..Default::default()
    };
    let votes = pool.tally(i, bank);
    let (p, kind) = feedback_plan(
        pool.target(i, bank),
        votes,
        margin,
        clause.polarity().is_positive(),
    );
    if p <= 0.0 || !rng.chance(p) {
        return stats;
    }
    let lits = pool.literals(i);
    give_feedback(clause, lits, kind, spec, rng);
    stats.feedback_events = 1;
    let output = clause.evaluate(lits, EvalMode::Train);
    if pool.record_unchecked(clause, i, bank, output) {
        stats.tally_writes = 1;
    }
    stats
}

pub(crate) fn changed_counts(banks: &mut [ClassBank]) -> Vec<usize> {
    banks
        .iter_mut()
        .map(|b| {
            b.clauses_mut()
                .iter_mut()
                .map(|c| c.take_changed() as usize)
                .sum::<usize>()
        })
        .collect()
}

/// A classifier: one alternating-polarity bank per class, or a single bank
/// for a binary machine decided by the sign of its vote sum.
#[derive(Debug, Clone)]
pub struct MultiClassTM {
    config: TMConfig,
    n_features: usize,
    n_classes: usize,
    banks: Vec<ClassBank>,
}

impl MultiClassTM {
    /// One bank per class.
    pub fn new(config: TMConfig, n_features: usize, n_classes: usize) -> Result<Self> {
        config.validate()?;
        if n_classes < 2 {
            return Err(Error::Config(format!(
                "classification needs at least 2 classes, got {n_classes}"
            )));
        }
        check_features(n_features)?;
        let banks = (0..n_classes)
            .map(|_| ClassBank::alternating(config.clauses, n_features, config.states))
            .collect();
        Ok(Self {
            config,
            n_features,
            n_classes,
            banks,
        })
    }

    /// Binary machine with a single bank; predicts 1 iff the vote sum is >= 0.
    pub fn binary(config: TMConfig, n_features: usize) -> Result<Self> {
        config.validate()?;
        check_features(n_features)?;
        let banks = vec![ClassBank::alternating(
            config.clauses,
            n_features,
            config.states,
        )];
        Ok(Self {
            config,
            n_features,
            n_classes: 2,
            banks,
        })
    }

    pub(crate) fn from_parts(
        config: TMConfig,
        n_features: usize,
        n_classes: usize,
        banks: Vec<ClassBank>,
    ) -> Self {
        Self {
            config,
            n_features,
            n_classes,
            banks,
        }
    }

    pub fn config(&self) -> &TMConfig {
        &self.config
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn banks(&self) -> &[ClassBank] {
        &self.banks
    }

    pub fn banks_mut(&mut self) -> &mut [ClassBank] {
        &mut self.banks
    }

    pub fn is_single_bank(&self) -> bool {
        self.banks.len() == 1
    }

    /// A pool whose tally layout matches this machine.
    pub fn pool(&self, data: &crate::data::BinaryDataset) -> Result<ExamplePool> {
        if data.n_features() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                actual: data.n_features(),
            });
        }
        ExamplePool::classification(data, self.banks.len())
    }

    /// Predict-mode vote sum of every bank.
    pub fn export_vote_sums(&self, x: &Literals) -> Vec<i32> {
        debug_assert_eq!(x.n_features(), self.n_features);
        self.vote_sums_packed(x.words())
    }

    pub(crate) fn vote_sums_packed(&self, lits: &[u64]) -> Vec<i32> {
        self.banks
            .iter()
            .map(|b| b.vote_sum(lits, EvalMode::Predict))
            .collect()
    }

    pub fn classify(&self, x: &Literals) -> usize {
        self.classify_packed(x.words())
    }

    pub(crate) fn classify_packed(&self, lits: &[u64]) -> usize {
        if self.banks.len() == 1 {
            return (self.banks[0].vote_sum(lits, EvalMode::Predict) >= 0) as usize;
        }
        argmax_first(&self.vote_sums_packed(lits))
    }

    /// Predictions for every row of `data`.
    pub fn predict(&self, data: &crate::data::BinaryDataset) -> Result<Vec<u32>> {
        if data.n_features() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                actual: data.n_features(),
            });
        }
        let mut words = vec![0; crate::literals::word_count(self.n_features)];
        Ok((0..data.len())
            .map(|i| {
                crate::literals::pack_into(data.row(i), &mut words);
                self.classify_packed(&words) as u32
            })
            .collect())
    }

    /// Fraction of rows classified correctly.
    pub fn accuracy(&self, data: &crate::data::BinaryDataset) -> Result<f64> {
        let truth = data
            .class_labels()
            .ok_or_else(|| Error::Input("accuracy needs class labels".into()))?;
        let preds = self.predict(data)?;
        crate::metrics::accuracy(&preds, truth)
    }

    pub fn train_epoch_sequential(
        &mut self,
        pool: &ExamplePool,
        rng: &mut FeedbackRng,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.check_pool(pool)?;
        train_epoch_sequential(&mut self.banks, &self.config, pool, rng, epoch)
    }

    pub fn train_epoch_parallel(
        &mut self,
        pool: &mut ExamplePool,
        workers: usize,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.check_pool(pool)?;
        train_epoch_parallel(&mut self.banks, &self.config, pool, workers, epoch)
    }

    /// Recomputes every tally of `pool` from the current clauses.
    pub fn refresh_tallies(&mut self, pool: &mut ExamplePool) -> Result<()> {
        self.check_pool(pool)?;
        pool.refresh_tallies(&mut self.banks)
    }

    fn check_pool(&self, pool: &ExamplePool) -> Result<()> {
        if pool.n_features() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                actual: pool.n_features(),
            });
        }
        if pool.banks() != self.banks.len() || !pool.is_classification() {
            return Err(Error::Input(
                "pool was not built for this machine's bank layout".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_features(n_features: usize) -> Result<()> {
    if n_features == 0 {
        return Err(Error::Config("need at least one feature".into()));
    }
    Ok(())
}

/// Index of the first maximum.
pub fn argmax_first(values: &[i32]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
