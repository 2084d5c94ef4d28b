use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bits reserved for the component index inside a stream id.
pub const COMPONENT_BITS: u32 = 20;

/// Stream `(replica << 20) | component` of the ChaCha8 generator keyed by `master`.
pub fn substream(master: u64, replica: u64, component: u64) -> ChaCha8Rng {
    debug_assert!(component < 1 << COMPONENT_BITS);
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(replica << COMPONENT_BITS | component);
    rng
}

/// Component 0 of a replica.
pub fn replica_rng(master: u64, replica: u64) -> ChaCha8Rng {
    substream(master, replica, 0)
}
