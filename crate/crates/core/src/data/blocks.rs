//! Block-based cross-validation: the dataset is cut into equal contiguous
//! blocks, and a permutation of block indices assigns them to the offline,
//! validation and online sets. Experiments re-run over many orderings and
//! average the results.

use serde::{Deserialize, Serialize};

use super::dataset::{Datapoint, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStore {
    blocks: Vec<Vec<Datapoint>>,
    block_len: usize,
}

impl BlockStore {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn block(&self, i: usize) -> &[Datapoint] {
        &self.blocks[i]
    }
}

/// Datapoint counts assigned to each set; each must be a multiple of the
/// block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetAllocation {
    pub offline: usize,
    pub validation: usize,
    pub online: usize,
}

impl SetAllocation {
    pub fn total(&self) -> usize {
        self.offline + self.validation + self.online
    }
}

/// A permutation of block indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockOrdering(Vec<usize>);

impl BlockOrdering {
    pub fn new(permutation: Vec<usize>) -> Result<Self> {
        let n = permutation.len();
        let mut seen = vec![false; n];
        for &b in &permutation {
            if b >= n || seen[b] {
                return Err(Error::Config(format!(
                    "not a permutation of 0..{n}: {permutation:?}"
                )));
            }
            seen[b] = true;
        }
        Ok(BlockOrdering(permutation))
    }

    pub fn identity(num_blocks: usize) -> Self {
        BlockOrdering((0..num_blocks).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// The three materialized sets for one ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSets {
    pub offline: Vec<Datapoint>,
    pub validation: Vec<Datapoint>,
    pub online: Vec<Datapoint>,
}

/// Cuts the dataset into contiguous, order-preserving blocks.
pub fn partition_blocks(dataset: &Dataset, block_len: usize) -> Result<BlockStore> {
    if block_len == 0 || !dataset.len().is_multiple_of(block_len) {
        return Err(Error::Config(format!(
            "block length {block_len} does not divide dataset size {}",
            dataset.len()
        )));
    }
    Ok(BlockStore {
        blocks: dataset
            .points
            .chunks(block_len)
            .map(|c| c.to_vec())
            .collect(),
        block_len,
    })
}

/// Walks blocks in permutation order, filling offline, then validation, then
/// online. Within-block order is preserved.
pub fn materialize_sets(
    store: &BlockStore,
    ordering: &BlockOrdering,
    alloc: &SetAllocation,
) -> Result<SplitSets> {
    let block_len = store.block_len();
    if ordering.as_slice().len() != store.num_blocks() {
        return Err(Error::Config(format!(
            "ordering over {} blocks but store has {}",
            ordering.as_slice().len(),
            store.num_blocks()
        )));
    }
    if alloc.total() != store.num_blocks() * block_len {
        return Err(Error::Config(format!(
            "allocation total {} does not match dataset size {}",
            alloc.total(),
            store.num_blocks() * block_len
        )));
    }
    for (name, len) in [
        ("offline", alloc.offline),
        ("validation", alloc.validation),
        ("online", alloc.online),
    ] {
        if len % block_len != 0 {
            return Err(Error::Config(format!(
                "{name} length {len} is not a multiple of block length {block_len}"
            )));
        }
    }

    let mut walk = ordering.as_slice().iter();
    let mut take = |len: usize| -> Vec<Datapoint> {
        let mut set = Vec::with_capacity(len);
        for _ in 0..len / block_len {
            let &b = walk.next().expect("allocation covers all blocks");
            set.extend_from_slice(store.block(b));
        }
        set
    };
    Ok(SplitSets {
        offline: take(alloc.offline),
        validation: take(alloc.validation),
        online: take(alloc.online),
    })
}

/// First `limit` permutations of `0..num_blocks` in lexicographic order.
pub fn enumerate_orderings(num_blocks: usize, limit: usize) -> Result<Vec<BlockOrdering>> {
    let max = factorial(num_blocks)
        .ok_or_else(|| Error::Config(format!("{num_blocks}! overflows; choose fewer blocks")))?;
    if limit as u128 > max {
        return Err(Error::Config(format!(
            "requested {limit} orderings but only {max} exist for {num_blocks} blocks"
        )));
    }
    let mut current: Vec<usize> = (0..num_blocks).collect();
    let mut out = Vec::with_capacity(limit);
    for _ in 0..limit {
        out.push(BlockOrdering(current.clone()));
        if !next_permutation(&mut current) {
            break;
        }
    }
    Ok(out)
}

pub fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

fn next_permutation(values: &mut [usize]) -> bool {
    let n = values.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| values[i] < values[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| values[j] > values[i]).unwrap();
    values.swap(i, j);
    values[i + 1..].reverse();
    true
}

/// With the filter enabled, drops every datapoint of `class`, preserving
/// order; disabled, returns the set unchanged.
pub fn filter_class(set: &[Datapoint], class: usize, enabled: bool) -> Vec<Datapoint> {
    if !enabled {
        return set.to_vec();
    }
    set.iter().filter(|p| p.label != class).cloned().collect()
}
