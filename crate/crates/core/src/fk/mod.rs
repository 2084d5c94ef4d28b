//! Finite-volume FK measures `Φ^{J,p,q,π}_E` and their exact evaluation.

mod boundary;
mod config;
mod exact;
mod params;

pub use boundary::{
    bell_number, boundary_classes, set_partitions, BoundaryPartition, SetPartitions,
    MAX_ENUMERATED_SPAN,
};
pub use config::{BondConfig, Media};
pub use exact::{
    averaged_worst_boundary, cluster_count, exact_averaged, exact_distribution, exact_from_probs,
    for_each_config, for_each_media, log_partition_y, partition_y, pressure_estimate,
    worst_boundary, ProbabilityTable, Wiring, MAX_AVERAGED_WORK, MAX_ENUMERATED_EDGES,
};
pub use params::{p_tilde, Atom, DisorderLaw, FkParams, Interaction};
