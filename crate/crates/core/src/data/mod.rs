//! Dataset ingestion, booleanization, block cross-validation and the online
//! input buffer.

mod blocks;
mod booleanize;
mod dataset;
mod ring;

pub use blocks::{
    enumerate_orderings, factorial, filter_class, materialize_sets, partition_blocks,
    BlockOrdering, BlockStore, SetAllocation, SplitSets,
};
pub use booleanize::{
    booleanize_dataset, booleanize_quantile, load_raw_csv, parse_raw_csv, quantile_thresholds,
};
pub use dataset::{
    format_dataset, load_dataset, parse_dataset, save_dataset, Datapoint, Dataset, Manifest,
};
pub use ring::CyclicBuffer;
