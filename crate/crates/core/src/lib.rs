//! Random-cluster (Fortuin–Kasteleyn) measures with quenched random couplings.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: boxes, edge sets, block decompositions, facets and the
//!   `(L, L')`-covering of a box.
//! - [`fk`]: exact finite-volume FK measures, boundary wirings, disorder
//!   averages and partition functions.
//! - [`sampler`]: heat-bath and Swendsen–Wang chains for the quenched
//!   measure, disorder replication, and the block product measure.
//! - [`cluster`]: cluster decompositions, crossing clusters, double
//!   connections, pivotal bonds and horizontal interfaces.
//! - [`coarse`]: seeds and block events used by the coarse graining.
//! - [`ising`]: dilute Ising model, Edwards–Sokal coupling and phase labels.
//! - [`verify`]: renormalisation constants, exhaustive inequality checks and
//!   finite-size Monte Carlo experiments.

pub mod cluster;
pub mod coarse;
mod error;
pub mod fk;
pub mod ising;
pub mod lattice;
pub mod sampler;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
