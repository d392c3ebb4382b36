//! Sequential matching and flow solvers used at the piece level.

pub mod blossom;
pub mod flow;
pub mod td;
pub mod weighted;
