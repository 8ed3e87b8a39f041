//! Tree decompositions and the nice form the dynamic
//! programs run on.

mod nice;
mod tree;

pub use nice::{
    make_nice, make_nice_with, validate_nice, EdgePlacement, NiceNode, NiceTreeDecomposition,
    NiceViolation, NodeKind,
};
pub use tree::{
    decomposition_from_ordering, exact_treewidth, min_fill_decomposition, min_fill_ordering,
    validate, TdViolation, TreeDecomposition, EXACT_TREEWIDTH_LIMIT,
};
