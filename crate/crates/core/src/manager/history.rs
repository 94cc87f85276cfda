//! Accuracy records and the per-run history — the artifact's primary output.

use serde::{Deserialize, Serialize};

use super::schedule::{EventAction, Schedule, SetId};
use crate::tm::TmConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccuracyRecord {
    pub set: SetId,
    pub errors: usize,
    pub total: usize,
    pub online_iteration: usize,
}

impl AccuracyRecord {
    pub fn accuracy(&self) -> f64 {
        debug_assert!(self.errors <= self.total && self.total > 0);
        1.0 - self.errors as f64 / self.total as f64
    }
}

/// One accuracy-analysis pass over the chosen sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Sequential index; 0 is the post-offline-training analysis.
    pub index: usize,
    pub online_iteration: usize,
    pub records: Vec<AccuracyRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedEvent {
    pub at_online_iteration: usize,
    pub action: EventAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub config: TmConfig,
    pub schedule: Schedule,
    pub ordering_id: u64,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub applied_events: Vec<AppliedEvent>,
    pub dropped_datapoints: u64,
    /// Recorded choice: accuracy analysis sees the same filtered view the
    /// trainer does during class-withheld phases.
    pub analysis_uses_filtered_view: bool,
}

impl RunHistory {
    /// Accuracy of `set` at checkpoint `index`, if analyzed there.
    pub fn accuracy_at(&self, index: usize, set: SetId) -> Option<f64> {
        self.checkpoints
            .get(index)?
            .records
            .iter()
            .find(|r| r.set == set)
            .map(AccuracyRecord::accuracy)
    }

    /// `ordering,checkpoint,set,errors,total,accuracy` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ordering,checkpoint,set,errors,total,accuracy\n");
        for cp in &self.checkpoints {
            for r in &cp.records {
                out.push_str(&format!(
                    "{},{},{},{},{},{:.6}\n",
                    self.ordering_id,
                    cp.index,
                    r.set.as_str(),
                    r.errors,
                    r.total,
                    r.accuracy()
                ));
            }
        }
        out
    }

    /// JSON sidecar: the full history including config echo and event log.
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tm::ClassMask;

    fn history() -> RunHistory {
        RunHistory {
            config: TmConfig {
                num_classes_max: 2,
                num_clauses_max: 4,
                num_clauses_active: 4,
                num_features: 2,
                ta_half_states: 8,
                s_offline: 1.375,
                s_online: 1.0,
                threshold: 4,
                class_active_mask: ClassMask::all(2),
                rng_seed: 5,
            },
            schedule: Schedule::basic(1, 2, 1.375, 1.0),
            ordering_id: 3,
            seed: 5,
            checkpoints: vec![
                Checkpoint {
                    index: 0,
                    online_iteration: 0,
                    records: vec![AccuracyRecord {
                        set: SetId::Offline,
                        errors: 2,
                        total: 10,
                        online_iteration: 0,
                    }],
                },
                Checkpoint {
                    index: 1,
                    online_iteration: 1,
                    records: vec![AccuracyRecord {
                        set: SetId::Offline,
                        errors: 1,
                        total: 10,
                        online_iteration: 1,
                    }],
                },
            ],
            applied_events: vec![],
            dropped_datapoints: 0,
            analysis_uses_filtered_view: true,
        }
    }

    #[test]
    fn accuracy_is_one_minus_error_rate() {
        let h = history();
        assert_eq!(h.accuracy_at(0, SetId::Offline), Some(0.8));
        assert_eq!(h.accuracy_at(1, SetId::Offline), Some(0.9));
        assert_eq!(h.accuracy_at(0, SetId::Online), None);
        assert_eq!(h.accuracy_at(9, SetId::Offline), None);
    }

    #[test]
    fn csv_schema_is_stable() {
        let csv = history().to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "ordering,checkpoint,set,errors,total,accuracy"
        );
        assert_eq!(lines.next().unwrap(), "3,0,offline,2,10,0.800000");
        assert_eq!(lines.next().unwrap(), "3,1,offline,1,10,0.900000");
    }

    #[test]
    fn json_round_trip() {
        let h = history();
        let json = h.to_json().unwrap();
        let back: RunHistory = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
    }
}
