//! Block events of the coarse graining: seeds, `ℰ`, `𝒟`, `𝒢`, `𝒯`, the
//! interface event `ℒ` and a good-slab probe.

mod events;
mod probe;
mod seeds;

pub use events::{
    block_report, cutoff_epsilon, event_d, event_e_l, event_e_lh, event_g, event_l, facet_scale,
    interface_region, seeds_and_event, BlockEventReport, CutoffPolicy, InterfaceEvent,
};
pub use probe::{j_good_slab_probe, ProbeCase, ProbeOptions, ProbeReport};
pub use seeds::find_seed;
