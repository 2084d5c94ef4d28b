//! Monte Carlo samplers for quenched and averaged FK measures.

mod heat_bath;
mod psi;
mod rng;
mod swendsen_wang;

pub use heat_bath::{
    detailed_balance_residual, heat_bath_kernels, heat_bath_step, replica_media, run_chain,
    sample_averaged, sample_quenched, stationarity_residual, sweep_kernel, ChainState, Dynamics,
    SampleBatch, ScanOrder, Schedule, MAX_KERNEL_EDGES,
};
pub use psi::{sample_psi, PsiOptions, PsiSampler};
pub use rng::{replica_rng, substream, COMPONENT_BITS};
pub use swendsen_wang::SwChain;
