//! The Tsetlin Automaton: a bounded counter over `2N` states.
//!
//! States `0..N-1` produce the *exclude* action, states `N..2N-1` produce
//! *include*. `N-1` and `N` are the midstates either side of the decision
//! boundary. Rewards push the state deeper into its current action, penalties
//! push it toward (and across) the boundary; both saturate at the ends.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaAction {
    Exclude,
    Include,
}

impl TaAction {
    pub fn is_include(self) -> bool {
        matches!(self, TaAction::Include)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaEvent {
    Reward,
    Penalty,
}

/// State every automaton starts in: the weakest exclude state `N-1`.
pub fn initial_state(half_states: u32) -> u32 {
    half_states - 1
}

/// Exclude below the midpoint, include at or above it.
pub fn ta_action(state: u32, half_states: u32) -> TaAction {
    debug_assert!(state < 2 * half_states);
    if state < half_states {
        TaAction::Exclude
    } else {
        TaAction::Include
    }
}

/// One reward/penalty step. Rewards saturate at 0 and `2N-1`; a penalty in a
/// midstate crosses the boundary.
pub fn ta_transition(state: u32, half_states: u32, event: TaEvent) -> u32 {
    debug_assert!(state < 2 * half_states);
    match (ta_action(state, half_states), event) {
        (TaAction::Exclude, TaEvent::Reward) => state.saturating_sub(1),
        (TaAction::Exclude, TaEvent::Penalty) => state + 1,
        (TaAction::Include, TaEvent::Reward) => (state + 1).min(2 * half_states - 1),
        (TaAction::Include, TaEvent::Penalty) => state - 1,
    }
}

/// One step toward include, independent of the current action.
pub fn step_toward_include(state: u32, half_states: u32) -> u32 {
    (state + 1).min(2 * half_states - 1)
}

/// One step toward exclude, independent of the current action.
pub fn step_toward_exclude(state: u32) -> u32 {
    state.saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Randomizer;

    #[test]
    fn action_boundary() {
        let n = 3;
        assert_eq!(ta_action(0, n), TaAction::Exclude);
        assert_eq!(ta_action(2, n), TaAction::Exclude); // midstate below the boundary
        assert_eq!(ta_action(3, n), TaAction::Include); // first state at the midpoint
        assert_eq!(ta_action(5, n), TaAction::Include);
    }

    #[test]
    fn reward_saturates_at_ends() {
        let n = 4;
        assert_eq!(ta_transition(2 * n - 1, n, TaEvent::Reward), 2 * n - 1);
        assert_eq!(ta_transition(0, n, TaEvent::Reward), 0);
    }

    #[test]
    fn penalty_crosses_boundary_from_midstate() {
        let n = 4;
        assert_eq!(ta_transition(n - 1, n, TaEvent::Penalty), n);
        assert_eq!(ta_transition(n, n, TaEvent::Penalty), n - 1);
    }

    #[test]
    fn reward_deepens_include() {
        let n = 4;
        assert_eq!(ta_transition(n, n, TaEvent::Reward), n + 1);
    }

    #[test]
    fn states_stay_in_bounds_under_random_events() {
        let n = 5;
        let mut rng = Randomizer::new(123);
        let mut state = initial_state(n);
        for _ in 0..100_000 {
            state = if rng.bernoulli(0.5) {
                ta_transition(state, n, TaEvent::Reward)
            } else {
                ta_transition(state, n, TaEvent::Penalty)
            };
            assert!(state < 2 * n);
        }
    }

    #[test]
    fn directed_steps_saturate() {
        let n = 3;
        assert_eq!(step_toward_include(2 * n - 1, n), 2 * n - 1);
        assert_eq!(step_toward_exclude(0), 0);
        assert_eq!(step_toward_include(n - 1, n), n);
        assert_eq!(step_toward_exclude(n), n - 1);
    }
}
