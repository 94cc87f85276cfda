//! Experiment runner: builds the reference use-case configurations, fans the
//! block orderings out over a worker pool and averages the resulting curves.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use otm_core::data::{
    enumerate_orderings, materialize_sets, partition_blocks, Dataset, SetAllocation,
};
use otm_core::fault::{FaultPlan, MachineDims, StuckAtKind};
use otm_core::manager::{run_schedule, Event, EventAction, RunHistory, Schedule, SetId};
use otm_core::rng::Randomizer;
use otm_core::tm::{ClassMask, TmConfig, TsetlinMachine};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UseCase {
    /// Offline training only; reports the starting accuracies.
    Baseline,
    /// Limited offline data followed by labelled online iterations.
    LimitedData,
    /// One class withheld, optionally introduced mid-run.
    NewClass,
    /// Stuck-at faults injected mid-run.
    Faults,
    /// Whatever the schedule says; no preset applied.
    Custom,
}

impl std::str::FromStr for UseCase {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "baseline" => UseCase::Baseline,
            "limited-data" | "limited_data" => UseCase::LimitedData,
            "new-class" | "new_class" => UseCase::NewClass,
            "faults" => UseCase::Faults,
            "custom" => UseCase::Custom,
            other => bail!("unknown use case '{other}'"),
        })
    }
}

/// The system parameters shared by the experiments, defaulting to the values
/// used for the iris runs: 16 clauses, s 1.375 offline / 1 online, T 15,
/// 10 offline epochs over 20 datapoints, 16 online iterations.
#[derive(Debug, Clone)]
pub struct RunParams {
    pub clauses: usize,
    pub clauses_max: usize,
    pub s_offline: f64,
    pub s_online: f64,
    pub threshold: u32,
    pub ta_half_states: u32,
    pub offline_epochs: usize,
    pub offline_points: Option<usize>,
    pub online_iterations: usize,
    pub online_learning: bool,
    /// Class withheld by the new-class use case.
    pub filter_class: usize,
    /// Iteration count after which the intervention lands (the event itself
    /// fires one iteration later, before that iteration's training pass).
    pub introduce_after: Option<usize>,
    pub fault_fraction: f64,
    pub fault_kind: StuckAtKind,
    pub extra_events: Vec<Event>,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            clauses: 16,
            clauses_max: 16,
            s_offline: 1.375,
            s_online: 1.0,
            threshold: 15,
            ta_half_states: 128,
            offline_epochs: 10,
            offline_points: Some(20),
            online_iterations: 16,
            online_learning: true,
            filter_class: 0,
            introduce_after: Some(5),
            fault_fraction: 0.2,
            fault_kind: StuckAtKind::StuckAt0,
            extra_events: Vec::new(),
        }
    }
}

/// Builds the machine config and schedule for one use case.
pub fn build_use_case(
    use_case: UseCase,
    dataset: &Dataset,
    params: &RunParams,
) -> Result<(TmConfig, Schedule)> {
    let mut config = TmConfig {
        num_classes_max: dataset.num_classes,
        num_clauses_max: params.clauses_max.max(params.clauses),
        num_clauses_active: params.clauses,
        num_features: dataset.num_features,
        ta_half_states: params.ta_half_states,
        s_offline: params.s_offline,
        s_online: params.s_online,
        threshold: params.threshold,
        class_active_mask: ClassMask::all(dataset.num_classes),
        rng_seed: 0, // per-ordering sub-seed fills this in
    };
    let mut schedule = Schedule::basic(
        params.offline_epochs,
        params.online_iterations,
        params.s_offline,
        params.s_online,
    );
    schedule.offline_points = params.offline_points;
    schedule.online_learning = params.online_learning;
    schedule.events = params.extra_events.clone();

    match use_case {
        UseCase::Baseline => {
            schedule.online_iterations = 0;
        }
        UseCase::LimitedData | UseCase::Custom => {}
        UseCase::NewClass => {
            let class = params.filter_class;
            schedule.filtered_class = Some(class);
            // The withheld class' bank is over-provisioned: present in the
            // machine, absent from the argmax until introduced.
            let active: Vec<usize> = (0..dataset.num_classes).filter(|&c| c != class).collect();
            config.class_active_mask = ClassMask::only(&active, dataset.num_classes)
                .context("new-class use case needs >= 2 classes")?;
            // The full offline block stays in play; filtering shrinks it.
            schedule.offline_points = None;
            if let Some(after) = params.introduce_after {
                let action = if params.online_learning {
                    EventAction::EnableClass(class)
                } else {
                    // Learning is off: the data streams change, the machine
                    // is never introduced to the class.
                    EventAction::DisableClassFilter
                };
                schedule.events.push(Event {
                    at_online_iteration: after + 1,
                    action,
                });
            }
        }
        UseCase::Faults => {
            let after = params.introduce_after.unwrap_or(5);
            let plan = FaultPlan::generate_even_spread(
                params.fault_fraction,
                params.fault_kind,
                MachineDims::of(&config),
                // Spread pattern derives from the fraction/kind choice, not
                // the per-ordering stream, so every ordering sees the same
                // physical fault map.
                0xFA17,
            )?;
            schedule.events.push(Event {
                at_online_iteration: after + 1,
                action: EventAction::InjectFaultPlan(plan),
            });
        }
    }
    Ok((config, schedule))
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub dataset: Dataset,
    pub config: TmConfig,
    pub schedule: Schedule,
    pub block_len: usize,
    pub allocation: SetAllocation,
    pub orderings: usize,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// The standard iris layout: blocks of 30 allocated 30/60/60.
    pub fn with_iris_layout(
        dataset: Dataset,
        config: TmConfig,
        schedule: Schedule,
        orderings: usize,
        master_seed: u64,
    ) -> Self {
        ExperimentSpec {
            dataset,
            config,
            schedule,
            block_len: 30,
            allocation: SetAllocation {
                offline: 30,
                validation: 60,
                online: 60,
            },
            orderings,
            master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub checkpoint: usize,
    pub online_iteration: usize,
    pub set: SetId,
    pub mean_accuracy: f64,
    pub orderings: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub histories: Vec<RunHistory>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentResult {
    pub fn mean_accuracy_at(&self, checkpoint: usize, set: SetId) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.checkpoint == checkpoint && r.set == set)
            .map(|r| r.mean_accuracy)
    }
}

/// Runs the schedule once per block ordering and averages the curves.
///
/// Deterministic for a fixed master seed: ordering `i` always runs with the
/// sub-seed `Randomizer::derive(master_seed, i)`, whatever the worker count.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentResult> {
    let store = partition_blocks(&spec.dataset, spec.block_len)?;
    let orderings = enumerate_orderings(store.num_blocks(), spec.orderings)?;
    spec.schedule.validate(&spec.config)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;

    let histories: Result<Vec<RunHistory>> = pool.install(|| {
        orderings
            .par_iter()
            .enumerate()
            .map(|(idx, ordering)| {
                let sub_seed = Randomizer::derive(spec.master_seed, idx as u64);
                let mut rng = Randomizer::new(sub_seed);
                let sets = materialize_sets(&store, ordering, &spec.allocation)?;
                let mut config = spec.config.clone();
                config.rng_seed = sub_seed;
                let machine = TsetlinMachine::new(config)?;
                let plan = FaultPlan::fault_free(MachineDims::of(machine.config()));
                let outcome = run_schedule(&spec.schedule, machine, &sets, plan, &mut rng)
                    .with_context(|| format!("ordering {idx}"))?;
                let mut history = outcome.history;
                history.ordering_id = idx as u64;
                Ok(history)
            })
            .collect()
    });
    let histories = histories?;
    let summary = aggregate(&histories)?;
    Ok(ExperimentResult { histories, summary })
}

/// Per-checkpoint arithmetic mean of each set's accuracy over the orderings.
pub fn aggregate(histories: &[RunHistory]) -> Result<Vec<SummaryRow>> {
    let Some(first) = histories.first() else {
        bail!("no run histories to aggregate");
    };
    let mut rows = Vec::new();
    for (cp_idx, cp) in first.checkpoints.iter().enumerate() {
        for record in &cp.records {
            let mut sum = 0.0;
            for h in histories {
                let r = h
                    .checkpoints
                    .get(cp_idx)
                    .and_then(|c| c.records.iter().find(|r| r.set == record.set))
                    .with_context(|| {
                        format!(
                            "ordering {} lacks checkpoint {cp_idx} for {}",
                            h.ordering_id, record.set
                        )
                    })?;
                sum += r.accuracy();
            }
            rows.push(SummaryRow {
                checkpoint: cp_idx,
                online_iteration: cp.online_iteration,
                set: record.set,
                mean_accuracy: sum / histories.len() as f64,
                orderings: histories.len(),
            });
        }
    }
    Ok(rows)
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("checkpoint,online_iteration,set,mean_accuracy,orderings\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{}\n",
            r.checkpoint,
            r.online_iteration,
            r.set.as_str(),
            r.mean_accuracy,
            r.orderings
        ));
    }
    out
}

/// Writes `summary.csv` plus per-ordering raw CSVs and JSON sidecars.
pub fn write_outputs(result: &ExperimentResult, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir.join("runs"))?;
    fs::write(out_dir.join("summary.csv"), summary_csv(&result.summary))?;
    for h in &result.histories {
        let stem = format!("ordering_{:03}", h.ordering_id);
        fs::write(out_dir.join("runs").join(format!("{stem}.csv")), h.to_csv())?;
        fs::write(
            out_dir.join("runs").join(format!("{stem}.json")),
            h.to_json()?,
        )?;
    }
    Ok(())
}
