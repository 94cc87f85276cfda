//! The machine: per-class clause banks, majority voting, argmax inference and
//! the two-step training update.

use super::automaton::ta_action;
use super::clause::{literals_of, ClauseTeam, EvalMode, Polarity};
use super::config::{validate_active_clauses, ClassMask, TmConfig};
use super::feedback::{
    apply_type1, apply_type2, feedback_probability, ClassSum, FeedbackRole, Type1Probs,
};
use crate::error::{Error, Result};
use crate::fault::FaultPlan;
use crate::rng::Randomizer;

#[derive(Debug, Clone, PartialEq)]
pub struct TsetlinMachine {
    config: TmConfig,
    /// `banks[class][clause]`, sized `num_classes_max x num_clauses_max`
    /// regardless of what is currently active.
    banks: Vec<Vec<ClauseTeam>>,
    train_steps: u64,
}

impl TsetlinMachine {
    pub fn new(config: TmConfig) -> Result<Self> {
        config.validate()?;
        let num_literals = config.num_literals();
        let banks = (0..config.num_classes_max)
            .map(|_| {
                (0..config.num_clauses_max)
                    .map(|j| {
                        ClauseTeam::new(
                            num_literals,
                            config.ta_half_states,
                            Polarity::from_index(j),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(TsetlinMachine {
            config,
            banks,
            train_steps: 0,
        })
    }

    pub fn config(&self) -> &TmConfig {
        &self.config
    }

    pub fn bank(&self, class: usize) -> &[ClauseTeam] {
        &self.banks[class]
    }

    /// Total `train_step` invocations since construction.
    pub fn train_step_count(&self) -> u64 {
        self.train_steps
    }

    /// Observed include bit for one literal: the TA action read through the
    /// fault plan.
    #[inline]
    fn observed_include(
        &self,
        plan: &FaultPlan,
        class: usize,
        clause: usize,
        literal: usize,
    ) -> bool {
        let state = self.banks[class][clause].ta_states()[literal];
        let action = ta_action(state, self.config.ta_half_states).is_include();
        plan.observe(class, clause, literal, action)
    }

    /// One clause's AND over the observed include bits, fused so no action
    /// vector is materialized.
    fn clause_output(
        &self,
        plan: &FaultPlan,
        class: usize,
        clause: usize,
        literals: &[bool],
        mode: EvalMode,
    ) -> bool {
        let mut any_included = false;
        for (i, &lit) in literals.iter().enumerate() {
            if self.observed_include(plan, class, clause, i) {
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

    /// Votes of the first `num_clauses_active` clauses: positive-polarity
    /// outputs minus negative-polarity outputs, plus the raw outputs.
    fn bank_votes(
        &self,
        plan: &FaultPlan,
        class: usize,
        literals: &[bool],
        mode: EvalMode,
    ) -> (i32, Vec<bool>) {
        let active = self.config.num_clauses_active;
        let mut outputs = Vec::with_capacity(active);
        let mut sum = 0i32;
        for j in 0..active {
            let out = self.clause_output(plan, class, j, literals, mode);
            outputs.push(out);
            if out {
                match self.banks[class][j].polarity() {
                    Polarity::Positive => sum += 1,
                    Polarity::Negative => sum -= 1,
                }
            }
        }
        (sum, outputs)
    }

    /// Inference-mode class sum for an active class.
    pub fn class_sum(&self, class: usize, literals: &[bool], plan: &FaultPlan) -> Result<ClassSum> {
        if !self.config.class_active_mask.is_active(class) {
            return Err(Error::InactiveClass(class));
        }
        if literals.len() != self.config.num_literals() {
            return Err(Error::Input(format!(
                "expected {} literals, got {}",
                self.config.num_literals(),
                literals.len()
            )));
        }
        let (sum, _) = self.bank_votes(plan, class, literals, EvalMode::Inference);
        Ok(ClassSum(sum))
    }

    /// Argmax of the class sums over active classes; ties go to the lowest
    /// class index (priority-encoder order).
    pub fn classify(&self, features: &[bool], plan: &FaultPlan) -> usize {
        debug_assert_eq!(features.len(), self.config.num_features);
        let literals = literals_of(features);
        let mut best: Option<(usize, i32)> = None;
        for class in self.config.class_active_mask.active_classes() {
            let (sum, _) = self.bank_votes(plan, class, &literals, EvalMode::Inference);
            match best {
                Some((_, best_sum)) if sum <= best_sum => {}
                _ => best = Some((class, sum)),
            }
        }
        best.expect("class mask never empty by construction").0
    }

    /// One training update: target feedback on the labelled class, then
    /// negative feedback on one uniformly sampled other active class, with
    /// Type I event probabilities derived canonically from `s`.
    pub fn train_step(
        &mut self,
        features: &[bool],
        label: usize,
        s: f64,
        rng: &mut Randomizer,
        plan: &FaultPlan,
    ) -> Result<()> {
        self.train_step_with_probs(features, label, Type1Probs::canonical(s), rng, plan)
    }

    /// [`Self::train_step`] with an explicit probability mapping — the swap-in
    /// point for non-canonical sensitivity schemes.
    pub fn train_step_with_probs(
        &mut self,
        features: &[bool],
        label: usize,
        probs: Type1Probs,
        rng: &mut Randomizer,
        plan: &FaultPlan,
    ) -> Result<()> {
        if !self.config.class_active_mask.is_active(label) {
            return Err(Error::InactiveClass(label));
        }
        if features.len() != self.config.num_features {
            return Err(Error::Input(format!(
                "expected {} features, got {}",
                self.config.num_features,
                features.len()
            )));
        }
        let literals = literals_of(features);

        self.feedback_pass(plan, label, &literals, FeedbackRole::Target, probs, rng);

        let others: Vec<usize> = self
            .config
            .class_active_mask
            .active_classes()
            .filter(|&c| c != label)
            .collect();
        if !others.is_empty() {
            let negative = others[rng.index(others.len())];
            self.feedback_pass(
                plan,
                negative,
                &literals,
                FeedbackRole::Negative,
                probs,
                rng,
            );
        }

        self.train_steps += 1;
        Ok(())
    }

    fn feedback_pass(
        &mut self,
        plan: &FaultPlan,
        class: usize,
        literals: &[bool],
        role: FeedbackRole,
        probs: Type1Probs,
        rng: &mut Randomizer,
    ) {
        // Clause outputs are frozen before any update in this pass.
        let (sum, outputs) = self.bank_votes(plan, class, literals, EvalMode::Learning);
        let p = feedback_probability(ClassSum(sum), self.config.threshold, role);
        let half_states = self.config.ta_half_states;

        let mut observed_excluded = vec![false; literals.len()];
        for (j, &output) in outputs.iter().enumerate() {
            if !rng.bernoulli(p) {
                continue;
            }
            let type1 = match (self.banks[class][j].polarity(), role) {
                (Polarity::Positive, FeedbackRole::Target) => true,
                (Polarity::Negative, FeedbackRole::Target) => false,
                (Polarity::Positive, FeedbackRole::Negative) => false,
                (Polarity::Negative, FeedbackRole::Negative) => true,
            };
            if type1 {
                apply_type1(
                    &mut self.banks[class][j],
                    literals,
                    output,
                    probs,
                    half_states,
                    rng,
                );
            } else {
                if output {
                    for (i, slot) in observed_excluded.iter_mut().enumerate() {
                        *slot = !self.observed_include(plan, class, j, i);
                    }
                }
                apply_type2(
                    &mut self.banks[class][j],
                    literals,
                    output,
                    &observed_excluded,
                    half_states,
                );
            }
        }
    }

    /// Adjusts how many clauses vote and train. Dormant clauses keep their TA
    /// states untouched until re-enabled.
    pub fn set_active_clauses(&mut self, count: usize) -> Result<()> {
        validate_active_clauses(count, self.config.num_clauses_max)?;
        self.config.num_clauses_active = count;
        Ok(())
    }

    /// Replaces the active-class mask. Banks of disabled classes are preserved
    /// untouched.
    pub fn set_active_classes(&mut self, mask: ClassMask) -> Result<()> {
        if mask.len() != self.config.num_classes_max {
            return Err(Error::Config(format!(
                "mask length {} does not match num_classes_max {}",
                mask.len(),
                self.config.num_classes_max
            )));
        }
        mask.require_non_empty()?;
        self.config.class_active_mask = mask;
        Ok(())
    }

    /// Enables one class, keeping the rest of the mask as-is.
    pub fn enable_class(&mut self, class: usize) -> Result<()> {
        let mut mask = self.config.class_active_mask.clone();
        mask.set(class, true)?;
        self.set_active_classes(mask)
    }

    pub fn set_threshold(&mut self, threshold: u32) -> Result<()> {
        if threshold < 1 {
            return Err(Error::Config("threshold T must be >= 1".into()));
        }
        self.config.threshold = threshold;
        Ok(())
    }

    pub(crate) fn from_parts(config: TmConfig, banks: Vec<Vec<ClauseTeam>>) -> Result<Self> {
        config.validate()?;
        if banks.len() != config.num_classes_max
            || banks.iter().any(|b| b.len() != config.num_clauses_max)
            || banks
                .iter()
                .flatten()
                .any(|t| t.num_literals() != config.num_literals())
        {
            return Err(Error::Config("bank shape does not match config".into()));
        }
        if banks
            .iter()
            .flatten()
            .flat_map(|t| t.ta_states())
            .any(|&s| s >= 2 * config.ta_half_states)
        {
            return Err(Error::Config("TA state outside [0, 2N-1]".into()));
        }
        Ok(TsetlinMachine {
            config,
            banks,
            train_steps: 0,
        })
    }

    #[cfg(test)]
    pub(crate) fn banks_mut(&mut self) -> &mut Vec<Vec<ClauseTeam>> {
        &mut self.banks
    }
}

/// Spec-shaped wrapper over the fused evaluation path: assembles the observed
/// action vector for one clause and evaluates it with [`evaluate_clause`].
pub fn clause_observed_actions(
    machine: &TsetlinMachine,
    plan: &FaultPlan,
    class: usize,
    clause: usize,
) -> Vec<bool> {
    (0..machine.config().num_literals())
        .map(|i| machine.observed_include(plan, class, clause, i))
        .collect()
}
