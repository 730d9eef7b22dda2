//! Tsetlin machine training and inference.
//!
//! Clauses are conjunctions of literals chosen by teams of two-action
//! Tsetlin automata. Besides the classical training loop, the crate provides
//! a clause-parallel asynchronous trainer: each training example carries a
//! shared vote tally that clauses keep up to date with atomic deltas, so
//! clauses learn independently of one another.
//!
//! ```
//! use paratm::{data::synth_xor, FeedbackRng, MultiClassTM, TMConfig};
//!
//! let data = synth_xor(400, 0.0, 1).unwrap();
//! let config = TMConfig { clauses: 10, margin: 5, specificity: 3.0, workers: 1, ..TMConfig::default() };
//! let mut tm = MultiClassTM::new(config, 2, 2).unwrap();
//! let pool = tm.pool(&data).unwrap();
//! let mut rng = FeedbackRng::new(1);
//! for epoch in 0..20 {
//!     tm.train_epoch_sequential(&pool, &mut rng, epoch).unwrap();
//! }
//! assert!(tm.accuracy(&data).unwrap() > 0.7);
//! ```

pub mod automaton;
pub mod bench;
pub mod clause;
pub mod config;
pub mod data;
pub mod error;
pub mod feedback;
pub mod fit;
pub mod literals;
pub mod metrics;
pub mod model_io;
pub mod pool;
pub mod regression;
pub mod trainer;

pub use automaton::{apply_transition, ta_action, Action, AutomatonState, Transition};
pub use clause::{evaluate_clause, ClassBank, Clause, EvalMode, Polarity};
pub use config::TMConfig;
pub use error::{Error, Result};
pub use feedback::{
    clause_update_probability, type_i_feedback, type_ii_feedback, FeedbackRng, Specificity,
};
pub use literals::{literal_value, Literals};
pub use pool::{vote_sum, ExamplePool, Target};
pub use regression::RegressionHead;
pub use trainer::{update_clause, EpochReport, MultiClassTM};
