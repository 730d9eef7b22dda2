//! Asynchronous clause-parallel training.
//!
//! All `m x n` clauses are dealt round-robin to the workers. Each worker
//! walks the epoch's shared example permutation once per owned clause,
//! starting at a clause-dependent offset, and runs [`update_on_example`]
//! against the pool's live tallies. Workers never lock; concurrent tally
//! adds are atomic and each clause's output bitmap belongs to its worker.

use std::time::Instant;

use super::{changed_counts, update_on_example, EpochReport, UpdateStats};
use crate::clause::{ClassBank, Clause};
use crate::config::TMConfig;
use crate::error::{Error, Result};
use crate::feedback::{splitmix, FeedbackRng, Specificity};
use crate::pool::ExamplePool;

/// One epoch of clause-parallel training on `workers` threads.
///
/// Clauses that do not track this pool's examples yet are bound to it first,
/// which zeroes all tallies.
pub fn train_epoch_parallel(
    banks: &mut [ClassBank],
    config: &TMConfig,
    pool: &mut ExamplePool,
    workers: usize,
    epoch: usize,
) -> Result<EpochReport> {
    if workers == 0 {
        return Err(Error::Config("workers must be positive".into()));
    }
    if pool.is_empty() {
        return Err(Error::Input("cannot train on an empty pool".into()));
    }
    if banks.len() != pool.banks() {
        return Err(Error::Input(format!(
            "{} banks for a pool with {} tally slots",
            banks.len(),
            pool.banks()
        )));
    }
    pool.bind(banks);
    let pool: &ExamplePool = pool;

    let spec = Specificity::new(config.specificity, config.boost_true_positive);
    let margin = config.margin;
    let q = pool.len();
    let epoch_seed = config.seed ^ splitmix(epoch as u64);

    let start = Instant::now();
    let order = crate::data::shuffled_indices(q, epoch_seed);

    let total: usize = banks.iter().map(ClassBank::len).sum();
    let workers = workers.min(total.max(1));
    let mut owned: Vec<Vec<(usize, usize, &mut Clause)>> =
        (0..workers).map(|_| Vec::new()).collect();
    let mut g = 0;
    for (b, bank) in banks.iter_mut().enumerate() {
        for clause in bank.clauses_mut() {
            owned[g % workers].push((b, g, clause));
            g += 1;
        }
    }

    let run = |w: usize, clauses: Vec<(usize, usize, &mut Clause)>| {
        let mut rng = FeedbackRng::stream(epoch_seed, w as u64);
        let mut stats = UpdateStats::default();
        for (b, g, clause) in clauses {
            let offset = g * q / total;
            for t in 0..q {
                let i = order[(offset + t) % q];
                stats += update_on_example(clause, pool, b, i, margin, &spec, &mut rng);
            }
        }
        stats
    };

    let stats = if workers == 1 {
        run(0, owned.pop().unwrap_or_default())
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = owned
                .into_iter()
                .enumerate()
                .map(|(w, clauses)| s.spawn(move || run(w, clauses)))
                .collect();
            let mut sum = UpdateStats::default();
            for h in handles {
                sum += h.join().expect("worker panicked");
            }
            sum
        })
    };

    let seconds = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    Ok(EpochReport {
        epoch,
        seconds,
        train_metric: None,
        test_metric: None,
        changed_clauses: changed_counts(banks),
        feedback_events: stats.feedback_events,
        tally_writes: stats.tally_writes,
    })
}
