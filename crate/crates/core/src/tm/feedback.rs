//! Feedback: the reinforcement path from a class vote back to the automata.
//!
//! Type I drives clauses toward firing on true patterns, Type II blocks false
//! positives by force-including contradicting literals. Both are gated per
//! clause by a probability that shrinks as the clamped class sum approaches
//! the threshold `T`, so a well-trained machine issues less and less feedback.

use super::automaton::{step_toward_exclude, step_toward_include};
use super::clause::ClauseTeam;
use crate::rng::Randomizer;

/// Signed majority vote of one class bank, before or after clamping to
/// `[-T, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassSum(pub i32);

impl ClassSum {
    pub fn clamp(self, threshold: u32) -> i32 {
        let t = threshold as i32;
        self.0.clamp(-t, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackRole {
    /// The bank of the labelled class: push its vote toward `+T`.
    Target,
    /// A sampled other class: push its vote toward `-T`.
    Negative,
}

/// `(T -/+ clamp(v)) / 2T` — the per-clause selection probability.
pub fn feedback_probability(v: ClassSum, threshold: u32, role: FeedbackRole) -> f64 {
    let t = threshold as f64;
    let clamped = v.clamp(threshold) as f64;
    match role {
        FeedbackRole::Target => (t - clamped) / (2.0 * t),
        FeedbackRole::Negative => (t + clamped) / (2.0 * t),
    }
}

/// The two event probabilities Type I derives from the sensitivity `s`.
///
/// The mapping is a single swap-in point: the canonical one below is what the
/// reference machines use, but alternative hardware mappings can be expressed
/// by constructing the probabilities directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Type1Probs {
    /// Chance a true literal of a firing clause steps toward include.
    pub strengthen: f64,
    /// Chance of a step toward exclude in the erosion branches.
    pub weaken: f64,
}

impl Type1Probs {
    /// Canonical mapping: strengthen with `(s-1)/s`, weaken with `1/s`.
    pub fn canonical(s: f64) -> Type1Probs {
        debug_assert!(s >= 1.0);
        Type1Probs {
            strengthen: (s - 1.0) / s,
            weaken: 1.0 / s,
        }
    }
}

/// Type I feedback on one clause.
///
/// Firing clause: true literals step toward include w.p. `strengthen`, false
/// literals toward exclude w.p. `weaken`. Silent clause: everything erodes
/// toward exclude w.p. `weaken`. Exactly one draw per literal either way, so
/// the randomizer stream stays aligned across branches.
pub fn apply_type1(
    team: &mut ClauseTeam,
    literals: &[bool],
    clause_output: bool,
    probs: Type1Probs,
    half_states: u32,
    rng: &mut Randomizer,
) {
    debug_assert_eq!(team.num_literals(), literals.len());
    let states = team.ta_states_mut();
    if clause_output {
        for (state, &lit) in states.iter_mut().zip(literals) {
            if lit {
                if rng.bernoulli(probs.strengthen) {
                    *state = step_toward_include(*state, half_states);
                }
            } else if rng.bernoulli(probs.weaken) {
                *state = step_toward_exclude(*state);
            }
        }
    } else {
        for state in states.iter_mut() {
            if rng.bernoulli(probs.weaken) {
                *state = step_toward_exclude(*state);
            }
        }
    }
}

/// Type II feedback on one clause: for a firing clause, every false literal
/// whose *observed* action is exclude steps toward include (probability 1).
///
/// `observed_excluded[i]` must be the post-fault action read for literal `i`;
/// feedback watches the same faulty outputs the clauses do.
pub fn apply_type2(
    team: &mut ClauseTeam,
    literals: &[bool],
    clause_output: bool,
    observed_excluded: &[bool],
    half_states: u32,
) {
    if !clause_output {
        return;
    }
    debug_assert_eq!(team.num_literals(), literals.len());
    let states = team.ta_states_mut();
    for ((state, &lit), &excluded) in states.iter_mut().zip(literals).zip(observed_excluded) {
        if !lit && excluded {
            *state = step_toward_include(*state, half_states);
        }
    }
}
