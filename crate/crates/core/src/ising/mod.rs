//! Dilute Ising model with plus boundary condition, its Edwards–Sokal
//! coupling with the wired FK measure at `q = 2`, and phase labels.

mod es;
mod exact;
mod labels;

pub use es::{
    block_magnetization, es_bond_given_spin, es_spin_given_bond, legendre_lambda_star, IsingChain,
};
pub use exact::{ising_exact, IsingSystem, SpinConfig, MAX_EXACT_SITES};
pub use labels::{phase_labels, LabelGeometry, LabelParams, PhaseLabels};
