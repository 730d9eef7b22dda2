//! Regression head: one bank of positive clauses whose clipped vote sum is
//! decoded linearly onto the target range.
//!
//! With margin `T`, a vote sum `v` in `0..=T` predicts
//! `y_min + v * (y_max - y_min) / T`. Training scales each target to
//! `t = round((y - y_min) * T / (y_max - y_min))`; a clause is updated with
//! probability `min(1, |t - v| / 2T)`, receiving Type I feedback when the
//! machine under-predicts and Type II when it over-predicts.

use crate::clause::{ClassBank, EvalMode};
use crate::config::TMConfig;
use crate::data::BinaryDataset;
use crate::error::{Error, Result};
use crate::feedback::{FeedbackRng, Specificity};
use crate::literals::{pack_into, word_count, Literals};
use crate::pool::{scale_target, ExamplePool, Target};
use crate::trainer::{
    check_features, feedback_plan, give_feedback, train_epoch_parallel, train_epoch_sequential,
    EpochReport,
};

#[derive(Debug, Clone)]
pub struct RegressionHead {
    config: TMConfig,
    n_features: usize,
    bank: ClassBank,
    y_min: f64,
    y_max: f64,
}

impl RegressionHead {
    pub fn new(config: TMConfig, n_features: usize, y_min: f64, y_max: f64) -> Result<Self> {
        config.validate_regression()?;
        check_features(n_features)?;
        if !(y_max > y_min) || !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::Config(format!(
                "target range [{y_min}, {y_max}] is empty"
            )));
        }
        let bank = ClassBank::all_positive(config.clauses, n_features, config.states);
        Ok(Self {
            config,
            n_features,
            bank,
            y_min,
            y_max,
        })
    }

    pub(crate) fn from_parts(
        config: TMConfig,
        n_features: usize,
        bank: ClassBank,
        y_min: f64,
        y_max: f64,
    ) -> Self {
        Self {
            config,
            n_features,
            bank,
            y_min,
            y_max,
        }
    }

    pub fn config(&self) -> &TMConfig {
        &self.config
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn bank(&self) -> &ClassBank {
        &self.bank
    }

    pub fn bank_mut(&mut self) -> &mut ClassBank {
        &mut self.bank
    }

    pub fn range(&self) -> (f64, f64) {
        (self.y_min, self.y_max)
    }

    /// Decodes a raw vote sum; clipped to `0..=T`.
    pub fn decode(&self, votes: i32) -> f64 {
        let t = self.config.margin as i32;
        let v = votes.clamp(0, t);
        self.y_min + v as f64 * (self.y_max - self.y_min) / t as f64
    }

    pub fn scale(&self, y: f64) -> Result<i32> {
        scale_target(y, self.y_min, self.y_max, self.config.margin)
    }

    pub fn predict_regress(&self, x: &Literals) -> f64 {
        self.decode(self.bank.vote_sum(x.words(), EvalMode::Predict))
    }

    /// One online update on a single example. Returns the number of clauses
    /// that received feedback.
    pub fn update_regress(&mut self, x: &Literals, y: f64, rng: &mut FeedbackRng) -> Result<usize> {
        if x.n_features() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                actual: x.n_features(),
            });
        }
        let t = self.scale(y)?;
        let spec = Specificity::new(self.config.specificity, self.config.boost_true_positive);
        let lits = x.words();
        let votes = self.bank.vote_sum(lits, EvalMode::Train);
        let mut events = 0;
        for clause in self.bank.clauses_mut() {
            let (p, kind) = feedback_plan(Target::Scaled(t), votes, self.config.margin, true);
            if p > 0.0 && rng.chance(p) {
                give_feedback(clause, lits, kind, &spec, rng);
                events += 1;
            }
        }
        Ok(events)
    }

    pub fn pool(&self, data: &BinaryDataset) -> Result<ExamplePool> {
        if data.n_features() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                actual: data.n_features(),
            });
        }
        ExamplePool::regression(data, self.y_min, self.y_max, self.config.margin)
    }

    fn check_pool(&self, pool: &ExamplePool) -> Result<()> {
        if pool.is_classification() || pool.banks() != 1 || pool.n_features() != self.n_features {
            return Err(Error::Input(
                "pool was not built for this regression head".into(),
            ));
        }
        Ok(())
    }

    pub fn train_epoch_sequential(
        &mut self,
        pool: &ExamplePool,
        rng: &mut FeedbackRng,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.check_pool(pool)?;
        train_epoch_sequential(
            std::slice::from_mut(&mut self.bank),
            &self.config,
            pool,
            rng,
            epoch,
        )
    }

    pub fn train_epoch_parallel(
        &mut self,
        pool: &mut ExamplePool,
        workers: usize,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.check_pool(pool)?;
        train_epoch_parallel(
            std::slice::from_mut(&mut self.bank),
            &self.config,
            pool,
            workers,
            epoch,
        )
    }

    pub fn refresh_tallies(&mut self, pool: &mut ExamplePool) -> Result<()> {
        self.check_pool(pool)?;
        pool.refresh_tallies(std::slice::from_mut(&mut self.bank))
    }

    pub fn predict(&self, data: &BinaryDataset) -> Result<Vec<f64>> {
        if data.n_features() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                actual: data.n_features(),
            });
        }
        let mut words = vec![0; word_count(self.n_features)];
        Ok((0..data.len())
            .map(|i| {
                pack_into(data.row(i), &mut words);
                self.decode(self.bank.vote_sum(&words, EvalMode::Predict))
            })
            .collect())
    }

    pub fn mae(&self, data: &BinaryDataset) -> Result<f64> {
        let truth = data
            .targets()
            .ok_or_else(|| Error::Input("MAE needs real-valued targets".into()))?;
        crate::metrics::mean_absolute_error(&self.predict(data)?, truth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_staircase;
    use proptest::prelude::*;

    fn head(margin: u32, clauses: usize) -> RegressionHead {
        let config = TMConfig {
            clauses,
            margin,
            specificity: 3.0,
            workers: 1,
            ..TMConfig::default()
        };
        RegressionHead::new(config, 4, 0.0, 100.0).unwrap()
    }

    #[test]
    fn decode_endpoints() {
        let h = head(10, 10);
        assert_eq!(h.decode(0), 0.0);
        assert_eq!(h.decode(10), 100.0);
        assert_eq!(h.decode(5), 50.0);
        assert_eq!(h.decode(-3), 0.0);
        assert_eq!(h.decode(25), 100.0);
        let x = Literals::from_bits(&[1, 0, 1, 1]).unwrap();
        assert_eq!(h.predict_regress(&x), 0.0);
    }

    #[test]
    fn on_target_update_is_noop() {
        let mut h = head(10, 6);
        let x = Literals::from_bits(&[1, 0, 1, 1]).unwrap();
        // empty clauses all fire in training: v = 6 -> target 60
        let mut rng = FeedbackRng::new(1);
        for _ in 0..1000 {
            assert_eq!(h.update_regress(&x, 60.0, &mut rng).unwrap(), 0);
        }
        for c in h.bank().clauses() {
            assert_eq!(c.counters(), vec![128; 8]);
        }
    }

    #[test]
    fn gate_half_when_maximally_under() {
        // every clause includes x1 and ¬x1, so v = 0; target y_max gives t = T
        let contradiction: Vec<u16> = vec![256, 128, 128, 128, 256, 128, 128, 128];
        let mut rng = FeedbackRng::new(11);
        let x = Literals::from_bits(&[1, 0, 1, 1]).unwrap();
        let (mut events, trials, clauses) = (0, 1000, 20);
        for _ in 0..trials {
            let mut h = head(10, clauses);
            for c in h.bank_mut().clauses_mut() {
                *c = crate::clause::Clause::from_counters(
                    crate::clause::Polarity::Positive,
                    4,
                    128,
                    &contradiction,
                )
                .unwrap();
            }
            events += h.update_regress(&x, 100.0, &mut rng).unwrap();
        }
        let rate = events as f64 / (trials * clauses) as f64;
        assert!((rate - 0.5).abs() < 0.02, "{rate}");
    }

    #[test]
    fn rejects_out_of_range_target() {
        let mut h = head(10, 6);
        let x = Literals::from_bits(&[1, 0, 1, 1]).unwrap();
        assert!(h
            .update_regress(&x, 101.0, &mut FeedbackRng::new(0))
            .is_err());
        assert!(RegressionHead::new(TMConfig::default(), 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn learns_staircase_roughly() {
        let train = synth_staircase(1000, 6, 1).unwrap();
        let test = synth_staircase(300, 6, 2).unwrap();
        let config = TMConfig {
            clauses: 30,
            margin: 6,
            specificity: 2.0,
            workers: 1,
            ..TMConfig::default()
        };
        let mut h = RegressionHead::new(config, 6, 0.0, 6.0).unwrap();
        let pool = h.pool(&train).unwrap();
        let mut rng = FeedbackRng::new(3);
        let before = h.mae(&test).unwrap();
        for e in 0..30 {
            h.train_epoch_sequential(&pool, &mut rng, e).unwrap();
        }
        let after = h.mae(&test).unwrap();
        assert!(after < before, "{before} -> {after}");
    }

    proptest! {
        #[test]
        fn decode_is_monotone_and_bounded(a in -50i32..50, b in -50i32..50, t in 1u32..40) {
            let h = head(t, 4);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(h.decode(lo) <= h.decode(hi));
            prop_assert!(h.decode(lo) >= 0.0 && h.decode(hi) <= 100.0);
        }
    }
}
