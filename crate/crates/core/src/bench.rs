//! Timing sweeps over clause counts and their CSV form.
//!
//! Each (mode, clause count) run trains one warm-up epoch followed by the
//! timed epochs. Only the epochs themselves are timed; metrics are computed
//! outside the timed region.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::config::TMConfig;
use crate::data::{BinaryDataset, Labels};
use crate::error::{Error, Result};
use crate::fit::{fit_classifier, fit_regressor, FitOptions, Mode, TallyRefresh};
use crate::regression::RegressionHead;
use crate::trainer::{EpochReport, MultiClassTM};

/// Column order of every bench CSV.
pub const BENCH_COLUMNS: [&str; 7] = [
    "mode",
    "workers",
    "clauses",
    "epoch",
    "seconds",
    "metric_name",
    "metric_value",
];

pub const MIN_TIMED_EPOCHS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub mode: String,
    pub workers: usize,
    pub clauses: usize,
    /// Epoch index, or for a summary row the last timed epoch.
    pub epoch: usize,
    /// Seconds for this epoch, or the median over timed epochs for a summary.
    pub seconds: f64,
    pub metric_name: String,
    pub metric_value: f64,
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub template: TMConfig,
    pub clause_counts: Vec<usize>,
    pub modes: Vec<Mode>,
    /// Timed epochs per run, not counting the warm-up epoch.
    pub epochs: usize,
    pub refresh: TallyRefresh,
    /// When set, each run uses margin `round(ratio * clauses)` instead of the
    /// template's margin.
    pub margin_ratio: Option<f64>,
    /// One row per epoch instead of one summary row per run.
    pub per_epoch: bool,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn run_once(
    config: TMConfig,
    train: &BinaryDataset,
    test: Option<&BinaryDataset>,
    opts: &FitOptions,
) -> Result<(&'static str, Vec<EpochReport>)> {
    let eval = test.unwrap_or(train);
    match train.labels() {
        Labels::Classes(_) => {
            let classes = train.n_classes().max(eval.n_classes()).max(2);
            let mut tm = MultiClassTM::new(config, train.n_features(), classes)?;
            let mut reports = fit_classifier(&mut tm, train, None, opts, |_| {})?;
            if let Some(last) = reports.last_mut() {
                last.test_metric = Some(tm.accuracy(eval)?);
            }
            Ok(("accuracy", reports))
        }
        Labels::Targets(y) => {
            let (lo, hi) = y
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            let mut head = RegressionHead::new(config, train.n_features(), lo, hi)?;
            let mut reports = fit_regressor(&mut head, train, None, opts, |_| {})?;
            if let Some(last) = reports.last_mut() {
                last.test_metric = Some(head.mae(eval)?);
            }
            Ok(("mae", reports))
        }
    }
}

/// Runs every (mode, clause count) pair with the template's seed and
/// returns the records in plan order.
pub fn bench_sweep(
    train: &BinaryDataset,
    test: Option<&BinaryDataset>,
    plan: &BenchPlan,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>> {
    if plan.clause_counts.is_empty() {
        return Err(Error::Config(
            "bench needs at least one clause count".into(),
        ));
    }
    if plan.epochs < MIN_TIMED_EPOCHS {
        return Err(Error::Config(format!(
            "bench needs at least {MIN_TIMED_EPOCHS} timed epochs, got {}",
            plan.epochs
        )));
    }
    let mut records = Vec::new();
    for mode in &plan.modes {
        for &n in &plan.clause_counts {
            let margin = match plan.margin_ratio {
                Some(r) => ((r * n as f64).round() as u32).max(1),
                None => plan.template.margin,
            };
            let config = TMConfig {
                clauses: n,
                margin,
                workers: mode.workers(),
                ..plan.template.clone()
            };
            let opts = FitOptions {
                mode: *mode,
                epochs: plan.epochs + 1,
                refresh: plan.refresh,
                evaluate: false,
            };
            let (metric_name, reports) = run_once(config, train, test, &opts)?;
            let timed = &reports[1..];
            let metric_value = reports
                .last()
                .and_then(|r| r.test_metric)
                .unwrap_or(f64::NAN);
            let row = |epoch: usize, seconds: f64| BenchRecord {
                mode: mode.name().into(),
                workers: mode.workers(),
                clauses: n,
                epoch,
                seconds,
                metric_name: metric_name.into(),
                metric_value,
            };
            let mut emit = |r: BenchRecord| {
                progress(&r);
                records.push(r);
            };
            if plan.per_epoch {
                for r in timed {
                    emit(row(r.epoch, r.seconds));
                }
            } else {
                let secs: Vec<f64> = timed.iter().map(|r| r.seconds).collect();
                emit(row(timed.last().map_or(0, |r| r.epoch), median(&secs)));
            }
        }
    }
    Ok(records)
}

pub fn write_bench_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(BENCH_COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
        .map_err(|e| Error::Input(format!("writing bench CSV: {e}")))?;
    Ok(())
}

/// Parses a bench CSV, insisting on the exact column order.
pub fn read_bench_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != BENCH_COLUMNS {
        return Err(Error::Format(format!(
            "bench CSV header {header:?} is not {BENCH_COLUMNS:?}"
        )));
    }
    let records = r
        .deserialize()
        .collect::<std::result::Result<Vec<BenchRecord>, _>>()?;
    if let Some(bad) = records.iter().find(|r| !(r.seconds > 0.0)) {
        return Err(Error::Format(format!(
            "non-positive seconds in row {bad:?}"
        )));
    }
    Ok(records)
}
