//! Two-action Tsetlin automata.
//!
//! A single automaton with depth `N` is a saturating counter over `1..=2N`.
//! The lower half selects [`Action::Exclude`], the upper half
//! [`Action::Include`]. Reinforcing Include moves the counter up, reinforcing
//! Exclude moves it down.

use serde::{Deserialize, Serialize};

/// Largest supported per-side depth; `2N` must fit in a `u16`.
pub const MAX_DEPTH: u16 = u16::MAX / 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Include,
    Exclude,
}

/// Feedback event delivered to one automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Reward,
    Penalty,
    Inaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AutomatonState(u16);

impl AutomatonState {
    /// Returns `None` unless `1 <= counter <= 2 * depth`.
    pub fn new(counter: u16, depth: u16) -> Option<Self> {
        if depth == 0 || depth > MAX_DEPTH || counter == 0 || counter > 2 * depth {
            None
        } else {
            Some(Self(counter))
        }
    }

    /// The last Exclude state, one penalty away from Include.
    pub fn boundary(depth: u16) -> Self {
        debug_assert!((1..=MAX_DEPTH).contains(&depth));
        Self(depth)
    }

    #[inline]
    pub fn counter(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn action(self, depth: u16) -> Action {
        if self.0 > depth {
            Action::Include
        } else {
            Action::Exclude
        }
    }

    #[inline]
    pub fn is_include(self, depth: u16) -> bool {
        self.0 > depth
    }

    /// Applies one feedback event, saturating at `1` and `2N`.
    #[inline]
    pub fn apply(self, event: Transition, depth: u16) -> Self {
        let include = self.is_include(depth);
        match (event, include) {
            (Transition::Inaction, _) => self,
            (Transition::Reward, true) | (Transition::Penalty, false) => self.increment(depth),
            (Transition::Reward, false) | (Transition::Penalty, true) => self.decrement(),
        }
    }

    #[inline]
    fn increment(self, depth: u16) -> Self {
        Self(if self.0 < 2 * depth {
            self.0 + 1
        } else {
            self.0
        })
    }

    #[inline]
    fn decrement(self) -> Self {
        Self(if self.0 > 1 { self.0 - 1 } else { 1 })
    }
}

/// Free-function form of [`AutomatonState::action`].
pub fn ta_action(state: AutomatonState, depth: u16) -> Action {
    state.action(depth)
}

/// Free-function form of [`AutomatonState::apply`].
pub fn apply_transition(state: AutomatonState, event: Transition, depth: u16) -> AutomatonState {
    state.apply(event, depth)
}
