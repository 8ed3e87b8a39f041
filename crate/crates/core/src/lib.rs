//! Conflict-free colorings of graphs of bounded treewidth, and guard
//! colorings of 1.5D terrains.

pub mod cfc;
pub mod decomposition;
mod dp;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod report;
pub mod scfc;
pub mod terrain;

pub use dp::{Solution, Stats};
pub use error::{Error, Result};
pub use graph::{Coloring, Graph, Verdict};
pub use terrain::{Problem, Terrain};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/decompositions.md")]
    mod decompositions {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/terrains.md")]
    mod terrains {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
