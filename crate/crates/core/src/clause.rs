//! Conjunctive clauses and per-class clause banks.

use serde::{Deserialize, Serialize};

use crate::automaton::{Action, AutomatonState, Transition};
use crate::error::{Error, Result};
use crate::literals::{self, word_count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    #[inline]
    pub fn sign(self) -> i32 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        matches!(self, Polarity::Positive)
    }

    /// Polarity of clause `j` (1-based) in an alternating bank: odd is positive.
    pub fn alternating(j: usize) -> Self {
        if j % 2 == 1 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

/// Empty clauses output 1 while training, 0 while predicting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalMode {
    Train,
    Predict,
}

#[derive(Debug, Clone)]
pub struct Clause {
    polarity: Polarity,
    depth: u16,
    n_features: usize,
    automata: Vec<AutomatonState>,
    /// Include decisions, packed in literal layout.
    include: Vec<u64>,
    include_count: usize,
    /// Last recorded output per pool example.
    prev_output: Vec<u64>,
    prev_len: usize,
    changed: bool,
}

impl Clause {
    /// An empty clause: every automaton sits at the Exclude boundary.
    pub fn new(polarity: Polarity, n_features: usize, depth: u16) -> Self {
        let automata = vec![AutomatonState::boundary(depth); 2 * n_features];
        Self {
            polarity,
            depth,
            n_features,
            automata,
            include: vec![0; word_count(n_features)],
            include_count: 0,
            prev_output: Vec::new(),
            prev_len: 0,
            changed: false,
        }
    }

    pub fn from_counters(
        polarity: Polarity,
        n_features: usize,
        depth: u16,
        counters: &[u16],
    ) -> Result<Self> {
        if counters.len() != 2 * n_features {
            return Err(Error::Format(format!(
                "clause has {} automata, expected {}",
                counters.len(),
                2 * n_features
            )));
        }
        let mut clause = Self::new(polarity, n_features, depth);
        for (k, &c) in counters.iter().enumerate() {
            let state = AutomatonState::new(c, depth).ok_or_else(|| {
                Error::Format(format!("counter {c} outside 1..={}", 2 * depth as u32))
            })?;
            clause.set_state(k, state);
        }
        clause.changed = false;
        Ok(clause)
    }

    #[inline]
    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn depth(&self) -> u16 {
        self.depth
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn automata(&self) -> &[AutomatonState] {
        &self.automata
    }

    pub fn counters(&self) -> Vec<u16> {
        self.automata.iter().map(|s| s.counter()).collect()
    }

    /// Action of literal `k0` (0-based).
    #[inline]
    pub fn action(&self, k0: usize) -> Action {
        self.automata[k0].action(self.depth)
    }

    #[inline]
    pub fn include_words(&self) -> &[u64] {
        &self.include
    }

    pub fn include_count(&self) -> usize {
        self.include_count
    }

    /// 0-based indices of included literals.
    pub fn included(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.automata.len()).filter(|&k| literals::bit(&self.include, k))
    }

    /// Conjunction of included literals over packed `lits`.
    #[inline]
    pub fn evaluate(&self, lits: &[u64], mode: EvalMode) -> bool {
        debug_assert_eq!(lits.len(), self.include.len());
        if self.include_count == 0 {
            return mode == EvalMode::Train;
        }
        self.include
            .iter()
            .zip(lits)
            .all(|(&inc, &lit)| inc & !lit == 0)
    }

    /// Applies one event to literal `k0`. Returns true if the action flipped.
    #[inline]
    pub(crate) fn apply(&mut self, k0: usize, event: Transition) -> bool {
        let before = self.automata[k0];
        let after = before.apply(event, self.depth);
        self.automata[k0] = after;
        let was = before.is_include(self.depth);
        let now = after.is_include(self.depth);
        if was != now {
            literals::set_bit(&mut self.include, k0, now);
            if now {
                self.include_count += 1;
            } else {
                self.include_count -= 1;
            }
            self.changed = true;
            true
        } else {
            false
        }
    }

    pub(crate) fn set_state(&mut self, k0: usize, state: AutomatonState) {
        let was = self.automata[k0].is_include(self.depth);
        let now = state.is_include(self.depth);
        self.automata[k0] = state;
        if was != now {
            literals::set_bit(&mut self.include, k0, now);
            if now {
                self.include_count += 1;
            } else {
                self.include_count -= 1;
            }
            self.changed = true;
        }
    }

    /// Number of pool examples this clause keeps an output bit for.
    pub fn tracked_examples(&self) -> usize {
        self.prev_len
    }

    /// Clears the recorded outputs and sizes the bitmap for `q` examples.
    pub fn reset_outputs(&mut self, q: usize) {
        self.prev_output.clear();
        self.prev_output.resize(q.div_ceil(64), 0);
        self.prev_len = q;
    }

    #[inline]
    pub fn previous_output(&self, i: usize) -> bool {
        literals::bit(&self.prev_output, i)
    }

    #[inline]
    pub(crate) fn store_output(&mut self, i: usize, value: bool) {
        literals::set_bit(&mut self.prev_output, i, value);
    }

    /// Returns whether any action flipped since the last call.
    pub(crate) fn take_changed(&mut self) -> bool {
        std::mem::replace(&mut self.changed, false)
    }
}

/// Free-function form of [`Clause::evaluate`] over raw 0/1 features.
pub fn evaluate_clause(clause: &Clause, x: &[u8], mode: EvalMode) -> Result<bool> {
    if x.len() != clause.n_features() {
        return Err(Error::Dimension {
            expected: clause.n_features(),
            actual: x.len(),
        });
    }
    let lits = literals::Literals::from_bits(x)?;
    Ok(clause.evaluate(lits.words(), mode))
}

/// The clauses of one class.
#[derive(Debug, Clone)]
pub struct ClassBank {
    clauses: Vec<Clause>,
}

impl ClassBank {
    /// `n` clauses with alternating polarity, clause 1 positive.
    pub fn alternating(n: usize, n_features: usize, depth: u16) -> Self {
        let clauses = (1..=n)
            .map(|j| Clause::new(Polarity::alternating(j), n_features, depth))
            .collect();
        Self { clauses }
    }

    pub fn all_positive(n: usize, n_features: usize, depth: u16) -> Self {
        let clauses = (0..n)
            .map(|_| Clause::new(Polarity::Positive, n_features, depth))
            .collect();
        Self { clauses }
    }

    pub fn from_clauses(clauses: Vec<Clause>) -> Self {
        Self { clauses }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clauses_mut(&mut self) -> &mut [Clause] {
        &mut self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Positive clause outputs minus negative clause outputs.
    pub fn vote_sum(&self, lits: &[u64], mode: EvalMode) -> i32 {
        self.clauses
            .iter()
            .filter(|c| c.evaluate(lits, mode))
            .map(|c| c.polarity().sign())
            .sum()
    }
}
