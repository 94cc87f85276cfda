//! Hyperparameter grid search over (clauses, T, s) using the baseline
//! (offline-only) experiment, ranked by mean validation accuracy.

use anyhow::{bail, Result};

use otm_core::data::Dataset;
use otm_core::manager::SetId;

use crate::experiment::{build_use_case, run_experiment, ExperimentSpec, RunParams, UseCase};

#[derive(Debug, Clone)]
pub struct SearchGrid {
    pub clauses: Vec<usize>,
    pub thresholds: Vec<u32>,
    pub s_offline: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRow {
    pub clauses: usize,
    pub threshold: u32,
    pub s_offline: f64,
    pub mean_validation: f64,
    pub mean_offline: f64,
}

/// Runs one baseline experiment per grid point. Ties rank by fewer clauses,
/// then lower T.
pub fn hyperparam_search(
    dataset: &Dataset,
    grid: &SearchGrid,
    base: &RunParams,
    orderings: usize,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<SearchRow>> {
    if grid.clauses.is_empty() || grid.thresholds.is_empty() || grid.s_offline.is_empty() {
        bail!("hyperparameter grid is empty");
    }
    let mut rows = Vec::new();
    for &clauses in &grid.clauses {
        for &threshold in &grid.thresholds {
            for &s in &grid.s_offline {
                let mut params = base.clone();
                params.clauses = clauses;
                params.clauses_max = clauses.max(base.clauses_max);
                params.threshold = threshold;
                params.s_offline = s;
                let (config, schedule) = build_use_case(UseCase::Baseline, dataset, &params)?;
                let spec = ExperimentSpec::with_iris_layout(
                    dataset.clone(),
                    config,
                    schedule,
                    orderings,
                    master_seed,
                );
                let result = run_experiment(&spec, workers)?;
                rows.push(SearchRow {
                    clauses,
                    threshold,
                    s_offline: s,
                    mean_validation: result
                        .mean_accuracy_at(0, SetId::Validation)
                        .expect("baseline analyzes the validation set"),
                    mean_offline: result
                        .mean_accuracy_at(0, SetId::Offline)
                        .expect("baseline analyzes the offline set"),
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        b.mean_validation
            .partial_cmp(&a.mean_validation)
            .expect("accuracies are finite")
            .then(a.clauses.cmp(&b.clauses))
            .then(a.threshold.cmp(&b.threshold))
    });
    Ok(rows)
}

pub fn search_csv(rows: &[SearchRow]) -> String {
    let mut out = String::from("rank,clauses,threshold,s_offline,mean_validation,mean_offline\n");
    for (i, r) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6}\n",
            i + 1,
            r.clauses,
            r.threshold,
            r.s_offline,
            r.mean_validation,
            r.mean_offline
        ));
    }
    out
}
