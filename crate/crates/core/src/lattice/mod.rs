//! Finite boxes of `Z^d`, edge sets, blocks, facets and coverings.

mod blocks;
mod covering;
mod edges;
mod point;
mod region;

pub use blocks::{
    block_indices, block_partition, face_facets, facet_offsets, Block, BlockPartition, Facet,
};
pub use covering::{Covering, CoveringAudit};
pub use edges::{Edge, EdgeKind, EdgeSet, Graph, SubGraph};
pub use point::{Point, MAX_DIM};
pub use region::{BoxIter, Face, LatticeBox};
