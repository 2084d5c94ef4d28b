use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::exact::SpinConfig;
use crate::cluster::UnionFind;
use crate::fk::{BondConfig, BoundaryPartition};
use crate::lattice::{Covering, Graph, LatticeBox};
use crate::sampler::SwChain;
use crate::{Error, Result};

/// Spins given bonds: constant on clusters, `+1` on clusters meeting `∂Λ`,
/// independent fair signs otherwise. `graph` is `E^w(Λ)`.
pub fn es_spin_given_bond<R: Rng + ?Sized>(
    graph: &Graph,
    lambda: &LatticeBox,
    omega: &[bool],
    rng: &mut R,
) -> SpinConfig {
    let n = graph.num_vertices();
    let mut uf = UnionFind::new(n);
    for (e, &open) in omega.iter().enumerate() {
        if open {
            let (a, b) = graph.ends(e);
            uf.union(a, b);
        }
    }
    let mut value = vec![0i8; n];
    for v in 0..n as u32 {
        if !lambda.contains(&graph.vertex(v)) {
            let r = uf.find(v) as usize;
            value[r] = 1;
        }
    }
    let mut s = vec![0i8; n];
    for v in 0..n as u32 {
        let r = uf.find(v) as usize;
        if value[r] == 0 {
            value[r] = if rng.gen::<bool>() { 1 } else { -1 };
        }
        s[v as usize] = value[r];
    }
    SpinConfig(s)
}

/// Bonds given spins: edge `e` opens with probability `1{σ_x = σ_y} p(J_e)`.
pub fn es_bond_given_spin<R: Rng + ?Sized>(
    graph: &Graph,
    spins: &SpinConfig,
    media: &[f64],
    beta: f64,
    rng: &mut R,
) -> BondConfig {
    BondConfig(
        (0..graph.num_edges())
            .map(|e| {
                let (a, b) = graph.ends(e);
                let p = -(-2.0 * beta * media[e]).exp_m1();
                spins.0[a as usize] == spins.0[b as usize] && p > 0.0 && rng.gen::<f64>() < p
            })
            .collect(),
    )
}

/// Swendsen–Wang chain for the dilute Ising model with plus boundary condition
/// on `E^w(Λ)`; after each sweep `(σ, ω)` is a draw of the Edwards–Sokal pair.
pub struct IsingChain<'g> {
    chain: SwChain<'g>,
}

impl<'g> IsingChain<'g> {
    pub fn new(graph: &'g Graph, media: &[f64], beta: f64, rng: ChaCha8Rng) -> Result<Self> {
        let probs = media.iter().map(|&j| -(-2.0 * beta * j).exp_m1()).collect();
        let span = graph.boundary_span().len();
        let pinned = if span > 0 { Some(0) } else { None };
        let chain = SwChain::new(
            graph,
            probs,
            2,
            &BoundaryPartition::wired(span),
            pinned,
            rng,
        )?;
        Ok(IsingChain { chain })
    }

    pub fn sweep(&mut self) {
        self.chain.sweep();
    }

    pub fn bonds(&self) -> &BondConfig {
        self.chain.config()
    }

    pub fn spins(&self) -> SpinConfig {
        SpinConfig(
            self.chain
                .vertex_colors()
                .iter()
                .map(|&c| if c == 0 { 1 } else { -1 })
                .collect(),
        )
    }
}

/// `L^{-d} Σ_{x ∈ Δ_i} σ_x`; `graph` indexes the spins.
pub fn block_magnetization(
    graph: &Graph,
    spins: &SpinConfig,
    covering: &Covering,
    k: usize,
) -> f64 {
    let core = &covering.cores[k];
    let sum: i64 = core
        .iter()
        .map(|p| {
            graph
                .vertex_id(&p)
                .map_or(0, |v| spins.0[v as usize] as i64)
        })
        .sum();
    sum as f64 / core.len() as f64
}

/// `Λ*(x) = (1+x)/2 ln(1+x) + (1-x)/2 ln(1-x)` on `(-1, 1)`.
pub fn legendre_lambda_star(x: f64) -> Result<f64> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::LegendreDomain { x });
    }
    Ok((1.0 + x) / 2.0 * x.ln_1p() + (1.0 - x) / 2.0 * (-x).ln_1p())
}
