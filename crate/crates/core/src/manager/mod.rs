//! Execution-flow management: schedules, timed events, accuracy analysis and
//! run histories.

mod history;
mod run;
mod schedule;

pub use history::{AccuracyRecord, AppliedEvent, Checkpoint, RunHistory};
pub use run::{
    analyze_accuracy, mitigation_policy, run_offline_training, run_schedule, MitigationAction,
    RunOutcome, SystemState,
};
pub use schedule::{CheckpointGranularity, Event, EventAction, Schedule, SetId};
