//! Software model of an online-learning Tsetlin Machine accelerator.
//!
//! The machine ([`tm`]) classifies boolean datapoints with per-class banks of
//! AND clauses learned by Tsetlin Automata, and supports training interleaved
//! with inference. Around it sit stuck-at fault injection on the automata
//! outputs ([`fault`]), block-based cross-validation and the online input
//! buffer ([`data`]), and the execution-flow engine with timed runtime
//! interventions ([`manager`]). Everything is driven by a seedable
//! [`rng::Randomizer`], so a (config, dataset, schedule, seed) tuple always
//! reproduces the same run bit for bit.

pub mod data;
pub mod error;
pub mod fault;
pub mod manager;
pub mod rng;
pub mod tm;

pub use error::{Error, Result};
