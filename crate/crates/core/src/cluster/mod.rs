//! Clusters, crossings, double connections, pivotal bonds and interfaces.

mod decompose;
mod interface;
pub mod oracle;
mod pivotal;
mod union_find;

pub use decompose::{
    crossing_cluster, crossing_report, decompose, density, face_masks, isolated_small_clusters,
    unique_large, ClusterDecomposition, ClusterInfo, CrossingReport,
};
pub use interface::horizontal_interface;
pub use pivotal::{
    doubly_connected_set, first_pivotal_bond, first_pivotal_bond_overlay, PivotalReport,
};
pub use union_find::UnionFind;
