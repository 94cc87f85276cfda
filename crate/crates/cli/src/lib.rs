//! Library side of the command-line front end: use-case builders, the
//! ordering fan-out, hyperparameter search and the throughput bench.

pub mod bench;
pub mod experiment;
pub mod search;

pub use experiment::{
    aggregate, build_use_case, run_experiment, summary_csv, write_outputs, ExperimentResult,
    ExperimentSpec, RunParams, SummaryRow, UseCase,
};
pub use search::{hyperparam_search, search_csv, SearchGrid, SearchRow};
