use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::UnionFind;
use crate::fk::{BondConfig, BoundaryPartition};
use crate::lattice::Graph;
use crate::{error::invalid, Result};

/// Swendsen–Wang dynamics for the Edwards–Sokal coupling of the `q`-state
/// Potts model with the FK measure. Vertices wired by `π` share one spin.
pub struct SwChain<'g> {
    graph: &'g Graph,
    probs: Vec<f64>,
    q: u32,
    site_of: Vec<u32>,
    colors: Vec<u32>,
    pinned: Option<u32>,
    omega: BondConfig,
    rng: ChaCha8Rng,
    uf: UnionFind,
    cluster_color: Vec<u32>,
}

impl<'g> SwChain<'g> {
    /// `pinned` fixes the spin of the wired block holding that span position to colour 0.
    pub fn new(
        graph: &'g Graph,
        probs: Vec<f64>,
        q: u32,
        pi: &BoundaryPartition,
        pinned: Option<usize>,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if q < 2 {
            return Err(invalid("q", "Swendsen-Wang needs q >= 2"));
        }
        let span = graph.boundary_span();
        if span.len() != pi.len() {
            return Err(invalid(
                "boundary partition",
                "length differs from boundary span",
            ));
        }
        let n = graph.num_vertices();
        let mut site_of: Vec<u32> = vec![u32::MAX; n];
        let mut next = 0u32;
        let nb = pi.num_blocks() as u32;
        for (i, &v) in span.iter().enumerate() {
            site_of[v as usize] = pi.labels()[i];
        }
        next += nb;
        for s in site_of.iter_mut().filter(|s| **s == u32::MAX) {
            *s = next;
            next += 1;
        }
        let pinned = match pinned {
            Some(i) if i < span.len() => Some(pi.labels()[i]),
            Some(_) => return Err(invalid("pinned", "outside the boundary span")),
            None => None,
        };
        let sites = next as usize;
        Ok(SwChain {
            graph,
            omega: BondConfig::closed(probs.len()),
            probs,
            q,
            site_of,
            colors: vec![0; sites],
            pinned,
            rng,
            uf: UnionFind::new(sites),
            cluster_color: vec![u32::MAX; sites],
        })
    }

    pub fn config(&self) -> &BondConfig {
        &self.omega
    }

    /// Colour of each vertex.
    pub fn vertex_colors(&self) -> Vec<u32> {
        self.site_of
            .iter()
            .map(|&s| self.colors[s as usize])
            .collect()
    }

    pub fn set_vertex_colors(&mut self, colors: &[u32]) -> Result<()> {
        if colors.len() != self.site_of.len() {
            return Err(invalid("colors", "length differs from vertex count"));
        }
        for (v, &c) in colors.iter().enumerate() {
            self.colors[self.site_of[v] as usize] = c % self.q;
        }
        if let Some(p) = self.pinned {
            self.colors[p as usize] = 0;
        }
        Ok(())
    }

    /// Open each edge between equal colours with probability `p(J_e)`.
    pub fn bond_update(&mut self) {
        for e in 0..self.probs.len() {
            let (a, b) = self.graph.ends(e);
            let same = self.colors[self.site_of[a as usize] as usize]
                == self.colors[self.site_of[b as usize] as usize];
            let p = self.probs[e];
            self.omega[e] = same && p > 0.0 && self.rng.gen::<f64>() < p;
        }
    }

    /// Recolour every cluster uniformly; the pinned cluster keeps colour 0.
    pub fn color_update(&mut self) {
        self.uf.reset();
        for e in 0..self.probs.len() {
            if self.omega[e] {
                let (a, b) = self.graph.ends(e);
                self.uf
                    .union(self.site_of[a as usize], self.site_of[b as usize]);
            }
        }
        self.cluster_color.iter_mut().for_each(|c| *c = u32::MAX);
        if let Some(p) = self.pinned {
            let r = self.uf.find(p);
            self.cluster_color[r as usize] = 0;
        }
        for s in 0..self.colors.len() {
            let r = self.uf.find(s as u32) as usize;
            if self.cluster_color[r] == u32::MAX {
                self.cluster_color[r] = self.rng.gen_range(0..self.q);
            }
            self.colors[s] = self.cluster_color[r];
        }
    }

    /// Colour update followed by bond update; `config` is then an FK sample.
    pub fn sweep(&mut self) {
        self.color_update();
        self.bond_update();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::{exact_from_probs, BoundaryPartition};
    use crate::lattice::{EdgeSet, LatticeBox};
    use crate::sampler::substream;

    #[test]
    fn matches_exact_marginal_on_square() {
        let g = Graph::new(&EdgeSet::free(
            &LatticeBox::from_ranges(&[(1, 2), (1, 2)]).unwrap(),
        ));
        let pi = BoundaryPartition::wired(4);
        let probs = vec![0.6; 4];
        let t = exact_from_probs(&g, &probs, 2.0, &pi).unwrap();
        let mut chain = SwChain::new(&g, probs, 2, &pi, None, substream(5, 0, 0)).unwrap();
        let n = 100_000;
        let mut open = 0usize;
        for _ in 0..n {
            chain.sweep();
            open += chain.config().count_open();
        }
        let est = open as f64 / (4 * n) as f64;
        let exact: f64 = (0..4).map(|e| t.marginal(e)).sum::<f64>() / 4.0;
        assert!((est - exact).abs() < 0.01, "{est} vs {exact}");
    }
}
