//! Matching patterns and small planar networks that mimic them.

pub mod catalog;
pub mod flow;
pub mod glue;
pub mod pattern;
pub mod weights;

pub use catalog::{
    catalog, enumerate_realizable_patterns, network_line, search_mimicking_network, verify_equivalence, Catalog,
    MimickingNetwork,
};
pub use pattern::{matching_pattern, pattern_weights, permutations, MatchingPattern};
pub use glue::{glue_into_face, Glued};
pub use weights::{assign_weights, weighted_network};
pub use flow::{combine, external_cuts, flow_mimick, planar_flow_mimick, FlowMimick};
