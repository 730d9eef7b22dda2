use serde::{Deserialize, Serialize};

use crate::automaton::MAX_DEPTH;
use crate::error::{Error, Result};

/// Hyperparameters shared by every bank of a machine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TMConfig {
    /// Clauses per class. Must be even for alternating-polarity banks.
    pub clauses: usize,
    /// Voting margin `T`.
    pub margin: u32,
    /// Specificity `s`.
    pub specificity: f64,
    /// States per action side `N`.
    pub states: u16,
    pub boost_true_positive: bool,
    pub epochs: usize,
    pub workers: usize,
    pub seed: u64,
}

impl Default for TMConfig {
    fn default() -> Self {
        Self {
            clauses: 100,
            margin: 15,
            specificity: 3.9,
            states: 128,
            boost_true_positive: false,
            epochs: 50,
            workers: default_workers(),
            seed: 0,
        }
    }
}

/// Available hardware parallelism, overridden by `TM_THREADS`.
pub fn default_workers() -> usize {
    if let Some(n) = std::env::var("TM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        return n;
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

impl TMConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clauses == 0 || !self.clauses.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "clauses must be even and positive, got {}",
                self.clauses
            )));
        }
        self.validate_common()
    }

    /// Validation for all-positive banks, where odd clause counts are fine.
    pub fn validate_regression(&self) -> Result<()> {
        if self.clauses == 0 {
            return Err(Error::Config("clauses must be positive".into()));
        }
        self.validate_common()
    }

    fn validate_common(&self) -> Result<()> {
        if self.margin < 1 {
            return Err(Error::Config("margin must be >= 1".into()));
        }
        if !(self.specificity >= 1.0) || !self.specificity.is_finite() {
            return Err(Error::Config(format!(
                "specificity must be >= 1, got {}",
                self.specificity
            )));
        }
        if self.states < 1 || self.states > MAX_DEPTH {
            return Err(Error::Config(format!(
                "states must be in 1..={MAX_DEPTH}, got {}",
                self.states
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> TMConfig {
        TMConfig {
            workers: 1,
            ..TMConfig::default()
        }
    }

    #[test]
    fn default_is_valid() {
        base().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let cases = [
            TMConfig {
                clauses: 7,
                ..base()
            },
            TMConfig {
                clauses: 0,
                ..base()
            },
            TMConfig {
                margin: 0,
                ..base()
            },
            TMConfig {
                specificity: 0.5,
                ..base()
            },
            TMConfig {
                specificity: f64::NAN,
                ..base()
            },
            TMConfig {
                states: 0,
                ..base()
            },
            TMConfig {
                epochs: 0,
                ..base()
            },
            TMConfig {
                workers: 0,
                ..base()
            },
        ];
        for c in cases {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn regression_allows_odd_clause_count() {
        let c = TMConfig {
            clauses: 7,
            ..base()
        };
        assert!(c.validate().is_err());
        c.validate_regression().unwrap();
    }
}
