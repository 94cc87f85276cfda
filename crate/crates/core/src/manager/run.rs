//! Execution flow: offline training, periodic accuracy analysis, interleaved
//! online training and timed runtime interventions.
//!
//! A run is strictly sequential. Offline training and analysis read their
//! sets directly; online training draws every datapoint through the cyclic
//! buffer. Events fire between iterations, before the training pass, so one
//! pass always runs on the new conditions before accuracy is re-read.

use serde::{Deserialize, Serialize};

use super::history::{AccuracyRecord, AppliedEvent, Checkpoint, RunHistory};
use super::schedule::{CheckpointGranularity, EventAction, Schedule, SetId};
use crate::data::{filter_class, CyclicBuffer, Datapoint, SplitSets};
use crate::error::{Error, Result};
use crate::fault::FaultPlan;
use crate::rng::Randomizer;
use crate::tm::TsetlinMachine;

/// Everything the runtime events can touch.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub machine: TsetlinMachine,
    pub fault_plan: FaultPlan,
    pub filtered_class: Option<usize>,
    pub online_learning: bool,
    pub s_online: f64,
}

impl SystemState {
    /// Applies one intervention atomically.
    pub fn apply_event(&mut self, action: &EventAction) -> Result<()> {
        match action {
            EventAction::EnableClass(class) => {
                self.machine.enable_class(*class)?;
                if self.filtered_class == Some(*class) {
                    self.filtered_class = None;
                }
            }
            EventAction::DisableClassFilter => self.filtered_class = None,
            EventAction::InjectFaultPlan(plan) => self.fault_plan = plan.clone(),
            EventAction::SetActiveClauses(count) => self.machine.set_active_clauses(*count)?,
            EventAction::SetS(s) => {
                if *s < 1.0 {
                    return Err(Error::Schedule(format!("set_s({s}) below 1")));
                }
                self.s_online = *s;
            }
            EventAction::SetThreshold(t) => self.machine.set_threshold(*t)?,
            EventAction::EnableOnlineLearning(on) => self.online_learning = *on,
        }
        Ok(())
    }
}

/// `epochs` full passes over the set in stored order.
pub fn run_offline_training(
    machine: &mut TsetlinMachine,
    set: &[Datapoint],
    epochs: usize,
    s_offline: f64,
    rng: &mut Randomizer,
    plan: &FaultPlan,
) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Schedule("offline training set is empty".into()));
    }
    for _ in 0..epochs {
        for p in set {
            machine.train_step(&p.features, p.label, s_offline, rng, plan)?;
        }
    }
    Ok(())
}

/// Counts classification errors over a set. Pure: never mutates the machine.
pub fn analyze_accuracy(
    machine: &TsetlinMachine,
    set: &[Datapoint],
    plan: &FaultPlan,
    set_id: SetId,
    online_iteration: usize,
) -> Result<AccuracyRecord> {
    if set.is_empty() {
        return Err(Error::EmptySet(set_id.as_str().into()));
    }
    let errors = set
        .iter()
        .filter(|p| machine.classify(&p.features, plan) != p.label)
        .count();
    Ok(AccuracyRecord {
        set: set_id,
        errors,
        total: set.len(),
        online_iteration,
    })
}

/// A finished run: the history plus the final machine and plan state.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub history: RunHistory,
    pub machine: TsetlinMachine,
    pub fault_plan: FaultPlan,
}

/// Runs the whole execution flow for one ordering's sets.
pub fn run_schedule(
    schedule: &Schedule,
    machine: TsetlinMachine,
    sets: &SplitSets,
    fault_plan: FaultPlan,
    rng: &mut Randomizer,
) -> Result<RunOutcome> {
    schedule.validate(machine.config())?;

    let mut sys = SystemState {
        machine,
        fault_plan,
        filtered_class: schedule.filtered_class,
        online_learning: schedule.online_learning,
        s_online: schedule.s_online,
    };
    let mut checkpoints: Vec<Checkpoint> = Vec::new();
    let mut applied_events: Vec<AppliedEvent> = Vec::new();

    let offline_view = |filtered: Option<usize>| -> Vec<Datapoint> {
        let truncated = match schedule.offline_points {
            Some(n) => &sets.offline[..n.min(sets.offline.len())],
            None => &sets.offline[..],
        };
        match filtered {
            Some(class) => filter_class(truncated, class, true),
            None => truncated.to_vec(),
        }
    };
    let view_of = |set_id: SetId, filtered: Option<usize>| -> Vec<Datapoint> {
        let base = match set_id {
            SetId::Offline => return offline_view(filtered),
            SetId::Validation => &sets.validation,
            SetId::Online => &sets.online,
        };
        match filtered {
            Some(class) => filter_class(base, class, true),
            None => base.to_vec(),
        }
    };

    run_offline_training(
        &mut sys.machine,
        &offline_view(sys.filtered_class),
        schedule.offline_epochs,
        schedule.s_offline,
        rng,
        &sys.fault_plan,
    )?;

    let analyze = |sys: &SystemState, index: usize, iteration: usize| -> Result<Checkpoint> {
        let records = schedule
            .sets_to_analyze
            .iter()
            .map(|&set_id| {
                analyze_accuracy(
                    &sys.machine,
                    &view_of(set_id, sys.filtered_class),
                    &sys.fault_plan,
                    set_id,
                    iteration,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Checkpoint {
            index,
            online_iteration: iteration,
            records,
        })
    };

    checkpoints.push(analyze(&sys, 0, 0)?);

    let buffer_capacity = schedule
        .buffer_capacity
        .unwrap_or_else(|| sets.online.len().max(1));
    let mut buffer: CyclicBuffer<Datapoint> = CyclicBuffer::new(buffer_capacity);

    for iteration in 1..=schedule.online_iterations {
        for event in &schedule.events {
            if event.at_online_iteration == iteration {
                sys.apply_event(&event.action)?;
                applied_events.push(AppliedEvent {
                    at_online_iteration: iteration,
                    action: event.action.clone(),
                });
            }
        }

        if sys.online_learning {
            // The parser bursts the iteration's rows into the buffer; the
            // trainer drains it. Overflow drops the oldest rows (counted).
            for p in view_of(SetId::Online, sys.filtered_class) {
                buffer.push(p);
            }
            let mut steps_this_iteration = 0usize;
            while let Some(p) = buffer.pop() {
                sys.machine
                    .train_step(&p.features, p.label, sys.s_online, rng, &sys.fault_plan)?;
                steps_this_iteration += 1;
                if let CheckpointGranularity::PerDatapoints(k) = schedule.checkpoint {
                    if steps_this_iteration.is_multiple_of(k) {
                        let index = checkpoints.len();
                        checkpoints.push(analyze(&sys, index, iteration)?);
                    }
                }
            }
        }

        let index = checkpoints.len();
        checkpoints.push(analyze(&sys, index, iteration)?);
    }

    let history = RunHistory {
        config: sys.machine.config().clone(),
        schedule: schedule.clone(),
        ordering_id: 0,
        seed: rng.seed(),
        checkpoints,
        applied_events,
        dropped_datapoints: buffer.dropped_count(),
        analysis_uses_filtered_view: true,
    };
    Ok(RunOutcome {
        history,
        machine: sys.machine,
        fault_plan: sys.fault_plan,
    })
}

/// Configured response when accuracy collapses (e.g. after faults).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MitigationAction {
    /// Enable over-provisioned clauses for retraining.
    EnableClauses(usize),
    /// Re-run offline training from the stored offline set.
    FullRetrain,
}

/// Emits the configured action when the latest offline-set accuracy has
/// fallen below `accuracy_threshold`.
pub fn mitigation_policy(
    history: &RunHistory,
    accuracy_threshold: f64,
    action: &MitigationAction,
) -> Option<MitigationAction> {
    let latest = history.checkpoints.last()?;
    let offline = latest.records.iter().find(|r| r.set == SetId::Offline)?;
    if offline.accuracy() < accuracy_threshold {
        Some(action.clone())
    } else {
        None
    }
}
