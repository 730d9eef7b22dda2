//! Classical single-threaded training loop.

use std::time::Instant;

use rand::seq::SliceRandom;

use super::{changed_counts, feedback_plan, give_feedback, EpochReport};
use crate::clause::{ClassBank, EvalMode};
use crate::config::TMConfig;
use crate::error::{Error, Result};
use crate::feedback::{FeedbackRng, Specificity};
use crate::pool::ExamplePool;

/// One epoch over a seeded shuffle of the pool.
///
/// Each example's vote sum is computed fresh for the banks it trains. With
/// one bank per class those are the example's own class (as `y' = 1`) and
/// one uniformly drawn other class (as `y' = 0`); single-bank machines train
/// their only bank. Tallies are neither read nor written.
pub fn train_epoch_sequential(
    banks: &mut [ClassBank],
    config: &TMConfig,
    pool: &ExamplePool,
    rng: &mut FeedbackRng,
    epoch: usize,
) -> Result<EpochReport> {
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
    let spec = Specificity::new(config.specificity, config.boost_true_positive);
    let margin = config.margin;
    let m = banks.len();

    let start = Instant::now();
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(rng);
    let mut events = 0u64;

    for &i in &order {
        let lits = pool.literals(i);
        let targets: [Option<usize>; 2] = if m == 1 {
            [Some(0), None]
        } else {
            let own = pool.label(i).expect("classification pool") as usize;
            let other = (own + 1 + rng.below(m - 1)) % m;
            [Some(own), Some(other)]
        };
        for b in targets.into_iter().flatten() {
            let bank = &mut banks[b];
            let votes = bank.vote_sum(lits, EvalMode::Train);
            let target = pool.target(i, b);
            for clause in bank.clauses_mut() {
                let (p, kind) =
                    feedback_plan(target, votes, margin, clause.polarity().is_positive());
                if p > 0.0 && rng.chance(p) {
                    give_feedback(clause, lits, kind, &spec, rng);
                    events += 1;
                }
            }
        }
    }

    let seconds = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    Ok(EpochReport {
        epoch,
        seconds,
        train_metric: None,
        test_metric: None,
        changed_clauses: changed_counts(banks),
        feedback_events: events,
        tally_writes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_xor, BinaryDataset, Labels};
    use crate::trainer::MultiClassTM;

    fn xor_config(seed: u64) -> TMConfig {
        TMConfig {
            clauses: 10,
            margin: 5,
            specificity: 3.0,
            epochs: 50,
            workers: 1,
            seed,
            ..TMConfig::default()
        }
    }

    #[test]
    fn learns_xor() {
        let data = synth_xor(1000, 0.0, 7).unwrap();
        let mut tm = MultiClassTM::new(xor_config(3), 2, 2).unwrap();
        let pool = tm.pool(&data).unwrap();
        let mut rng = FeedbackRng::new(3);
        for e in 0..50 {
            tm.train_epoch_sequential(&pool, &mut rng, e).unwrap();
            if tm.accuracy(&data).unwrap() == 1.0 {
                return;
            }
        }
        panic!("xor not learned: {}", tm.accuracy(&data).unwrap());
    }

    #[test]
    fn single_example_vote_bound() {
        let data = BinaryDataset::new(3, vec![1, 0, 1], Labels::Classes(vec![1])).unwrap();
        let cfg = TMConfig {
            clauses: 2,
            ..xor_config(1)
        };
        let mut tm = MultiClassTM::binary(cfg, 3).unwrap();
        let pool = tm.pool(&data).unwrap();
        let mut rng = FeedbackRng::new(0);
        for e in 0..20 {
            tm.train_epoch_sequential(&pool, &mut rng, e).unwrap();
            let v = tm.banks()[0].vote_sum(pool.literals(0), EvalMode::Train);
            assert!(v.abs() <= 2);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let data = synth_xor(300, 0.1, 2).unwrap();
        let run = || {
            let mut tm = MultiClassTM::new(xor_config(4), 2, 2).unwrap();
            let pool = tm.pool(&data).unwrap();
            let mut rng = FeedbackRng::new(4);
            let reports: Vec<_> = (0..5)
                .map(|e| {
                    tm.train_epoch_sequential(&pool, &mut rng, e)
                        .unwrap()
                        .feedback_events
                })
                .collect();
            let counters: Vec<Vec<u16>> = tm
                .banks()
                .iter()
                .flat_map(|b| b.clauses().iter().map(|c| c.counters()))
                .collect();
            (reports, counters)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_pool_rejected() {
        let data = BinaryDataset::new(2, vec![], Labels::Classes(vec![])).unwrap();
        let mut tm = MultiClassTM::new(xor_config(1), 2, 2).unwrap();
        let pool = tm.pool(&data).unwrap();
        assert!(tm
            .train_epoch_sequential(&pool, &mut FeedbackRng::new(0), 0)
            .is_err());
    }
}
