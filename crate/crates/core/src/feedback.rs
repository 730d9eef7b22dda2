//! Type I / Type II clause feedback and margin-based update gating.
//!
//! Every automaton of the clause draws its own uniform variate per Type I
//! event. Type II is deterministic.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::automaton::Transition;
use crate::clause::{Clause, EvalMode};

/// Seedable random stream; one per worker.
#[derive(Debug, Clone)]
pub struct FeedbackRng(Xoshiro256PlusPlus);

impl FeedbackRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// An independent stream derived from `seed` and a stream id.
    pub fn stream(seed: u64, stream: u64) -> Self {
        Self::new(splitmix(
            seed ^ splitmix(stream.wrapping_add(0x632B_E59B_D9B4_E019)),
        ))
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// True with probability `p`; `p <= 0` never fires, `p >= 1` always does.
    #[inline]
    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        ((self.0.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

impl RngCore for FeedbackRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Probability of updating a clause given the recorded vote sum `v`.
pub fn clause_update_probability(v: i32, y: bool, margin: u32) -> f64 {
    let t = margin as i64;
    let clipped = (v as i64).clamp(-t, t);
    let e = if y { t - clipped } else { t + clipped };
    e as f64 / (2 * t) as f64
}

/// Precomputed Type I probabilities for a specificity `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Specificity {
    strong: f64,
    weak: f64,
    boost: bool,
}

impl Specificity {
    pub fn new(s: f64, boost_true_positive: bool) -> Self {
        debug_assert!(s >= 1.0);
        Self {
            strong: (s - 1.0) / s,
            weak: 1.0 / s,
            boost: boost_true_positive,
        }
    }

    /// `(s-1)/s`, or 1 with boosting.
    pub fn reward_true_include(&self) -> f64 {
        if self.boost {
            1.0
        } else {
            self.strong
        }
    }

    pub fn strong(&self) -> f64 {
        self.strong
    }

    pub fn weak(&self) -> f64 {
        self.weak
    }
}

/// Type I feedback. Returns the number of action flips.
pub fn type_i_feedback(
    clause: &mut Clause,
    lits: &[u64],
    spec: &Specificity,
    rng: &mut FeedbackRng,
) -> usize {
    let output = clause.evaluate(lits, EvalMode::Train);
    let p_include_reward = spec.reward_true_include();
    let p_strong = spec.strong;
    let p_weak = spec.weak;
    let n_literals = clause.automata().len();
    let mut flips = 0;
    for k in 0..n_literals {
        let literal = (lits[k / 64] >> (k % 64)) & 1 == 1;
        let include = (clause.include_words()[k / 64] >> (k % 64)) & 1 == 1;
        let event = if output && literal {
            if include {
                if rng.chance(p_include_reward) {
                    Transition::Reward
                } else {
                    Transition::Inaction
                }
            } else if rng.chance(p_strong) {
                Transition::Penalty
            } else {
                Transition::Inaction
            }
        } else {
            // an included false literal would have made the output 0
            debug_assert!(!(output && include && !literal));
            if rng.chance(p_weak) {
                if include {
                    Transition::Penalty
                } else {
                    Transition::Reward
                }
            } else {
                Transition::Inaction
            }
        };
        if event != Transition::Inaction && clause.apply(k, event) {
            flips += 1;
        }
    }
    flips
}

/// Type II feedback. Returns the number of action flips.
pub fn type_ii_feedback(clause: &mut Clause, lits: &[u64]) -> usize {
    if !clause.evaluate(lits, EvalMode::Train) {
        return 0;
    }
    let n_literals = clause.automata().len();
    let mut flips = 0;
    for w in 0..lits.len() {
        let valid = if (w + 1) * 64 <= n_literals {
            u64::MAX
        } else {
            (1u64 << (n_literals - w * 64)) - 1
        };
        // excluded literals that are false
        let mut targets = !lits[w] & !clause.include_words()[w] & valid;
        while targets != 0 {
            let k = w * 64 + targets.trailing_zeros() as usize;
            targets &= targets - 1;
            if clause.apply(k, Transition::Penalty) {
                flips += 1;
            }
        }
    }
    flips
}
