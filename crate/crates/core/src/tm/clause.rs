//! Clauses: AND expressions over the input literals, owned by a team of
//! Tsetlin Automata (one automaton per literal).

use serde::{Deserialize, Serialize};

use super::automaton::initial_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// Even clause indices vote for the class, odd ones against. This keeps
    /// the active half/half split for every even active-clause count.
    pub fn from_index(clause_index: usize) -> Polarity {
        if clause_index.is_multiple_of(2) {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

/// Evaluation context for a clause: an untrained (empty) clause outputs 1
/// during learning so Type I feedback can populate it, but 0 during inference
/// so it cannot vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Inference,
    Learning,
}

/// One clause: `2F` automata (feature literals first, then complements) and a
/// fixed polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseTeam {
    ta_states: Vec<u32>,
    polarity: Polarity,
}

impl ClauseTeam {
    pub fn new(num_literals: usize, half_states: u32, polarity: Polarity) -> Self {
        ClauseTeam {
            ta_states: vec![initial_state(half_states); num_literals],
            polarity,
        }
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn ta_states(&self) -> &[u32] {
        &self.ta_states
    }

    pub(crate) fn ta_states_mut(&mut self) -> &mut [u32] {
        &mut self.ta_states
    }

    pub fn num_literals(&self) -> usize {
        self.ta_states.len()
    }
}

/// Expands a datapoint into its literal vector: `F` features followed by the
/// `F` complements.
pub fn literals_of(features: &[bool]) -> Vec<bool> {
    let mut literals = Vec::with_capacity(features.len() * 2);
    literals.extend_from_slice(features);
    literals.extend(features.iter().map(|&x| !x));
    literals
}

/// AND of the literals whose (post-fault) action bit is include.
///
/// `actions[i]` is the observed include bit for literal `i`. An empty clause
/// (no literal included) follows the [`EvalMode`] convention.
pub fn evaluate_clause(literals: &[bool], actions: &[bool], mode: EvalMode) -> bool {
    debug_assert_eq!(literals.len(), actions.len());
    let mut any_included = false;
    for (&lit, &included) in literals.iter().zip(actions) {
        if included {
            any_included = true;
            if !lit {
                return false;
            }
        }
    }
    if any_included {
        true
    } else {
        mode == EvalMode::Learning
    }
}
