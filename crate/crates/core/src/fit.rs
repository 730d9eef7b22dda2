//! Multi-epoch training driver shared by the CLI, the benchmark sweep and
//! the tests.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::BinaryDataset;
use crate::error::{Error, Result};
use crate::feedback::FeedbackRng;
use crate::pool::ExamplePool;
use crate::regression::RegressionHead;
use crate::trainer::{EpochReport, MultiClassTM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sequential,
    Parallel { workers: usize },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Sequential => "sequential",
            Mode::Parallel { .. } => "parallel",
        }
    }

    pub fn workers(&self) -> usize {
        match *self {
            Mode::Sequential => 1,
            Mode::Parallel { workers } => workers,
        }
    }
}

/// When the parallel trainer recomputes its tallies from scratch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TallyRefresh {
    /// Tallies start at zero and are only ever maintained by deltas.
    #[default]
    Never,
    /// Exact recount before every epoch; the recount is timed with the epoch.
    EveryEpoch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub mode: Mode,
    pub epochs: usize,
    pub refresh: TallyRefresh,
    /// Compute train/test metrics after each epoch (outside the timed region).
    pub evaluate: bool,
}

impl FitOptions {
    pub fn new(mode: Mode, epochs: usize) -> Self {
        Self {
            mode,
            epochs,
            refresh: TallyRefresh::default(),
            evaluate: true,
        }
    }
}

trait Learner {
    fn pool(&self, data: &BinaryDataset) -> Result<ExamplePool>;
    fn seed(&self) -> u64;
    fn sequential(
        &mut self,
        pool: &ExamplePool,
        rng: &mut FeedbackRng,
        epoch: usize,
    ) -> Result<EpochReport>;
    fn parallel(
        &mut self,
        pool: &mut ExamplePool,
        workers: usize,
        epoch: usize,
    ) -> Result<EpochReport>;
    fn refresh(&mut self, pool: &mut ExamplePool) -> Result<()>;
    fn metric(&self, data: &BinaryDataset) -> Result<f64>;
}

impl Learner for MultiClassTM {
    fn pool(&self, data: &BinaryDataset) -> Result<ExamplePool> {
        MultiClassTM::pool(self, data)
    }
    fn seed(&self) -> u64 {
        self.config().seed
    }
    fn sequential(
        &mut self,
        pool: &ExamplePool,
        rng: &mut FeedbackRng,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.train_epoch_sequential(pool, rng, epoch)
    }
    fn parallel(
        &mut self,
        pool: &mut ExamplePool,
        workers: usize,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.train_epoch_parallel(pool, workers, epoch)
    }
    fn refresh(&mut self, pool: &mut ExamplePool) -> Result<()> {
        self.refresh_tallies(pool)
    }
    fn metric(&self, data: &BinaryDataset) -> Result<f64> {
        self.accuracy(data)
    }
}

impl Learner for RegressionHead {
    fn pool(&self, data: &BinaryDataset) -> Result<ExamplePool> {
        RegressionHead::pool(self, data)
    }
    fn seed(&self) -> u64 {
        self.config().seed
    }
    fn sequential(
        &mut self,
        pool: &ExamplePool,
        rng: &mut FeedbackRng,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.train_epoch_sequential(pool, rng, epoch)
    }
    fn parallel(
        &mut self,
        pool: &mut ExamplePool,
        workers: usize,
        epoch: usize,
    ) -> Result<EpochReport> {
        self.train_epoch_parallel(pool, workers, epoch)
    }
    fn refresh(&mut self, pool: &mut ExamplePool) -> Result<()> {
        self.refresh_tallies(pool)
    }
    fn metric(&self, data: &BinaryDataset) -> Result<f64> {
        self.mae(data)
    }
}

fn fit<L: Learner>(
    learner: &mut L,
    train: &BinaryDataset,
    test: Option<&BinaryDataset>,
    opts: &FitOptions,
    mut on_epoch: impl FnMut(&EpochReport),
) -> Result<Vec<EpochReport>> {
    if let Mode::Parallel { workers: 0 } = opts.mode {
        return Err(Error::Config("workers must be positive".into()));
    }
    let mut pool = learner.pool(train)?;
    let mut rng = FeedbackRng::new(learner.seed());
    let mut reports = Vec::with_capacity(opts.epochs);
    for epoch in 0..opts.epochs {
        let mut report = match opts.mode {
            Mode::Sequential => learner.sequential(&pool, &mut rng, epoch)?,
            Mode::Parallel { workers } => {
                let start = Instant::now();
                if opts.refresh == TallyRefresh::EveryEpoch {
                    learner.refresh(&mut pool)?;
                }
                let refresh_seconds = start.elapsed().as_secs_f64();
                let mut r = learner.parallel(&mut pool, workers, epoch)?;
                r.seconds += refresh_seconds;
                r
            }
        };
        if opts.evaluate {
            report.train_metric = Some(learner.metric(train)?);
            report.test_metric = test.map(|t| learner.metric(t)).transpose()?;
        }
        on_epoch(&report);
        reports.push(report);
    }
    Ok(reports)
}

/// Trains a classifier for `opts.epochs` epochs; metrics are accuracies.
pub fn fit_classifier(
    tm: &mut MultiClassTM,
    train: &BinaryDataset,
    test: Option<&BinaryDataset>,
    opts: &FitOptions,
    on_epoch: impl FnMut(&EpochReport),
) -> Result<Vec<EpochReport>> {
    fit(tm, train, test, opts, on_epoch)
}

/// Trains a regression head; metrics are mean absolute errors.
pub fn fit_regressor(
    head: &mut RegressionHead,
    train: &BinaryDataset,
    test: Option<&BinaryDataset>,
    opts: &FitOptions,
    on_epoch: impl FnMut(&EpochReport),
) -> Result<Vec<EpochReport>> {
    fit(head, train, test, opts, on_epoch)
}
