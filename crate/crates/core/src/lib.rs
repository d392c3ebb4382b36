//! Perfect matchings, minimum-weight perfect matchings and maximum st-flows
//! in graphs that decompose into 3-clique-sums of planar and bounded-treewidth
//! pieces.

pub mod decompose;
pub mod engine;
pub mod generators;
pub mod error;
pub mod graph;
pub mod heavy_path;
pub mod mimic;
pub mod oracle;
pub mod solve;

pub use error::{Error, Result};
pub use graph::{Graph, Matching, TerminalSet};
