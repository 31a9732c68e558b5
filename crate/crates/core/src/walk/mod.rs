//! Shortest-path machinery on the walking graph: plain Dijkstra, a
//! distance-preserving contraction hierarchy, the partially contracted core
//! graph used for transfer enumeration, and bucket-based one-to-many queries.

mod bucket;
mod ch;
mod contract;
mod core_graph;
mod dijkstra;

pub use bucket::{BucketIndex, DistanceList};
pub use ch::{build_ch, ContractionHierarchy};
pub use core_graph::{build_core, CoreGraph};
pub use dijkstra::{bounded_dijkstra, dijkstra};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WalkError {
    #[error("vertex {0} is not part of the walking graph")]
    UnknownVertex(u32),
    #[error("keep set references vertex {0} which is not part of the graph")]
    UnknownKeepVertex(u32),
}
