//! Separators of size at most three, laminar families, and the clique-sum
//! decomposition tree with planar / bounded-treewidth piece labels.

pub mod laminar;
pub mod separators;
pub mod tree;
pub mod treewidth;

pub use laminar::{is_laminar_family, is_maximal_in, laminar_family, laminar_family_with, MisMode};
pub use separators::{are_laminar, is_minimal_separator, minimal_separators_up_to_3, Separator};
pub use tree::{
    build_decomposition_tree, build_decomposition_tree_with, decompose, Clique, DecomposeConfig,
    DecompositionTree, Node, Piece, PieceLabel,
};
pub use treewidth::{treewidth_at_most, TreeDecomposition};
