use rand::Rng;

use super::heat_bath::{ChainState, ScanOrder};
use super::rng::substream;
use crate::fk::{
    exact_distribution, p_tilde, BondConfig, BoundaryPartition, DisorderLaw, FkParams, Media,
};
use crate::lattice::{block_partition, BlockPartition, EdgeSet, Graph, LatticeBox};
use crate::{error::invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PsiOptions {
    /// Blocks with at most this many edges are sampled exactly.
    pub exact_limit: usize,
    /// Heat-bath sweeps per block otherwise.
    pub sweeps: u64,
}

impl Default for PsiOptions {
    fn default() -> Self {
        PsiOptions {
            exact_limit: 12,
            sweeps: 100,
        }
    }
}

/// Sampler for the product measure `Ψ^L_Λ`: independent averaged free FK
/// measures on the block interiors and on each lateral edge.
pub struct PsiSampler {
    partition: BlockPartition,
    block_graph: Graph,
    num_edges: usize,
    law: DisorderLaw,
    params: FkParams,
    options: PsiOptions,
}

impl PsiSampler {
    pub fn new(
        lambda: &LatticeBox,
        l: i32,
        law: &DisorderLaw,
        params: &FkParams,
        options: PsiOptions,
    ) -> Result<Self> {
        params.validate()?;
        let partition = block_partition(lambda, l)?;
        let first = partition
            .indices
            .first()
            .ok_or_else(|| invalid("lambda", "no blocks"))?;
        let block_graph = Graph::new(&crate::lattice::Block::new(*first, l).interior_edges());
        if options.sweeps == 0 {
            return Err(invalid("sweeps", "must be positive"));
        }
        Ok(PsiSampler {
            num_edges: EdgeSet::wired(lambda).len(),
            partition,
            block_graph,
            law: law.clone(),
            params: *params,
            options,
        })
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// One draw of `(J, ω)` on `E^w(Λ)`, using streams of `replica` only.
    pub fn sample(&self, seed: u64, replica: u64) -> Result<(Media, BondConfig)> {
        let mut media = vec![0.0; self.num_edges];
        let mut omega = BondConfig::closed(self.num_edges);
        let mut rng = substream(seed, replica, 0);
        for &e in &self.partition.lateral {
            let j = self.law.sample(&mut rng);
            media[e as usize] = j;
            let p = p_tilde(self.params.interaction.prob(j), self.params.q);
            omega[e as usize] = rng.gen::<f64>() < p;
        }
        let g = &self.block_graph;
        let free = BoundaryPartition::free(g.boundary_span().len());
        for (k, ids) in self.partition.interior_edges.iter().enumerate() {
            let mut rng = substream(seed, replica, 1 + k as u64);
            let local = self.law.sample_media(ids.len(), &mut rng);
            let states: Vec<bool> = if ids.len() <= self.options.exact_limit {
                let t = exact_distribution(g, &local, &self.params, &free)?;
                BondConfig::from_mask(ids.len(), t.sample(&mut rng)).0
            } else {
                let mut chain = ChainState::new(g, &local, &self.params, &free, rng)?;
                for _ in 0..self.options.sweeps {
                    chain.sweep(ScanOrder::Systematic);
                }
                chain.config().0.clone()
            };
            for (i, &e) in ids.iter().enumerate() {
                media[e as usize] = local[i];
                omega[e as usize] = states[i];
            }
        }
        Ok((Media(media), omega))
    }
}

/// A single draw from `Ψ^L_Λ`.
pub fn sample_psi(
    lambda: &LatticeBox,
    l: i32,
    law: &DisorderLaw,
    params: &FkParams,
    seed: u64,
) -> Result<(Media, BondConfig)> {
    PsiSampler::new(lambda, l, law, params, PsiOptions::default())?.sample(seed, 0)
}
