//! The top-level algorithms: perfect matching, minimum-weight perfect
//! matching and maximum st-flow on clique-sums of planar and
//! bounded-treewidth pieces.

pub mod flow;
pub mod log;
pub mod matching;
pub mod matrix;

pub use flow::{find_max_flow, find_max_flow_with, FlowRun};
pub use log::{MergeRecord, PathRecord, WitnessLog};
pub use matching::{
    find_min_weight_pm, find_min_weight_pm_with, find_perfect_matching, find_perfect_matching_with, node_sides,
    piece_solver, transfer_matrix, MatchingRun, NodeGraph, PieceSolver,
};
pub use matrix::{semiring_product, Product, Semiring, TransferMatrix};

use crate::decompose::DecomposeConfig;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineConfig {
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    pub decompose: DecomposeConfig,
}

impl EngineConfig {
    pub fn with_threads(threads: usize) -> Self {
        EngineConfig { threads, ..Default::default() }
    }
}

pub(crate) fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
