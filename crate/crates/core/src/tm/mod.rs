//! The Tsetlin Machine core: automata, clauses, voting, feedback and runtime
//! reconfiguration of over-provisioned resources.

pub mod automaton;
pub mod clause;
mod config;
pub mod feedback;
mod machine;
pub mod snapshot;

pub use automaton::{initial_state, ta_action, ta_transition, TaAction, TaEvent};
pub use clause::{evaluate_clause, literals_of, ClauseTeam, EvalMode, Polarity};
pub use config::{ClassMask, TmConfig};
pub use feedback::{feedback_probability, ClassSum, FeedbackRole, Type1Probs};
pub use machine::{clause_observed_actions, TsetlinMachine};
