use crate::cluster::UnionFind;
use crate::lattice::{EdgeSet, Graph, LatticeBox};
use crate::{error::invalid, Error, Result};

pub const MAX_EXACT_SITES: usize = 20;
const MAX_JOINT_BITS: usize = 26;

/// Spins `±1` on the vertices of `E^w(Λ)`, indexed like its graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfig(pub Vec<i8>);

/// Enumerable dilute Ising system with plus boundary condition on `Λ`.
#[derive(Clone, Debug)]
pub struct IsingSystem {
    pub lambda: LatticeBox,
    pub graph: Graph,
    /// Vertex ids of the sites of `Λ`, in lexicographic order.
    pub sites: Vec<u32>,
    pub probs: Vec<f64>,
    pub media: Vec<f64>,
    pub beta: f64,
}

impl IsingSystem {
    pub fn new(lambda: &LatticeBox, media: &[f64], beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(invalid(
                "beta",
                format!("need finite beta >= 0, got {beta}"),
            ));
        }
        let graph = Graph::new(&EdgeSet::wired(lambda));
        if media.len() != graph.num_edges() {
            return Err(invalid("media", "length differs from E^w(Λ)"));
        }
        let sites: Vec<u32> = lambda
            .iter()
            .map(|p| graph.vertex_id(&p).expect("sites lie in the span"))
            .collect();
        let probs = media.iter().map(|&j| -(-2.0 * beta * j).exp_m1()).collect();
        Ok(IsingSystem {
            lambda: *lambda,
            graph,
            sites,
            probs,
            media: media.to_vec(),
            beta,
        })
    }

    /// Spins from a mask over the sites; bit `k` set means site `k` is `-1`.
    pub fn spins(&self, mask: u64) -> SpinConfig {
        let mut s = vec![1i8; self.graph.num_vertices()];
        for (k, &v) in self.sites.iter().enumerate() {
            if mask >> k & 1 == 1 {
                s[v as usize] = -1;
            }
        }
        SpinConfig(s)
    }

    fn check_sites(&self) -> Result<()> {
        if self.sites.len() > MAX_EXACT_SITES {
            return Err(Error::TooLarge {
                what: "site count",
                size: self.sites.len() as u64,
                limit: MAX_EXACT_SITES as u64,
            });
        }
        Ok(())
    }

    /// `μ^{J,+}_{Λ,β}` over site masks.
    pub fn ising_exact(&self) -> Result<Vec<f64>> {
        self.check_sites()?;
        let n = self.sites.len();
        let mut lw: Vec<f64> = (0..1u64 << n)
            .map(|mask| {
                let s = self.spins(mask);
                (0..self.graph.num_edges())
                    .map(|e| {
                        let (a, b) = self.graph.ends(e);
                        self.media[e] * (s.0[a as usize] * s.0[b as usize]) as f64
                    })
                    .sum::<f64>()
                    * self.beta
            })
            .collect();
        normalise_log(&mut lw);
        Ok(lw)
    }

    /// Probability of `bonds` given `spins` under the coupling.
    pub fn bond_given_spin(&self, spins: &SpinConfig, bonds: u64) -> f64 {
        let mut p = 1.0;
        for e in 0..self.graph.num_edges() {
            let (a, b) = self.graph.ends(e);
            let agree = spins.0[a as usize] == spins.0[b as usize];
            let open = bonds >> e & 1 == 1;
            let pe = if agree { self.probs[e] } else { 0.0 };
            p *= if open { pe } else { 1.0 - pe };
        }
        p
    }

    /// Probability of `spins` given `bonds`: spins constant on clusters,
    /// `+1` on clusters meeting `∂Λ`, fair coins elsewhere.
    pub fn spin_given_bond(&self, bonds: u64, spins: &SpinConfig) -> f64 {
        let g = &self.graph;
        let mut uf = UnionFind::new(g.num_vertices());
        for e in 0..g.num_edges() {
            if bonds >> e & 1 == 1 {
                let (a, b) = g.ends(e);
                uf.union(a, b);
            }
        }
        let n = g.num_vertices();
        let mut value = vec![0i8; n];
        let mut boundary = vec![false; n];
        for v in 0..n as u32 {
            if !self.lambda.contains(&g.vertex(v)) {
                boundary[uf.find(v) as usize] = true;
            }
        }
        let mut free_clusters = 0;
        for v in 0..n as u32 {
            let r = uf.find(v) as usize;
            let s = spins.0[v as usize];
            if value[r] == 0 {
                value[r] = s;
                if boundary[r] {
                    if s != 1 {
                        return 0.0;
                    }
                } else {
                    free_clusters += 1;
                }
            } else if value[r] != s {
                return 0.0;
            }
        }
        0.5f64.powi(free_clusters)
    }

    fn check_joint(&self) -> Result<()> {
        self.check_sites()?;
        let bits = self.sites.len() + self.graph.num_edges();
        if bits > MAX_JOINT_BITS {
            return Err(Error::TooLarge {
                what: "sites + edges",
                size: bits as u64,
                limit: MAX_JOINT_BITS as u64,
            });
        }
        Ok(())
    }

    /// Edwards–Sokal joint law; entry `spin_mask << m | bond_mask`.
    pub fn es_joint_exact(&self) -> Result<Vec<f64>> {
        self.check_joint()?;
        let m = self.graph.num_edges();
        let n = self.sites.len();
        let mut w = vec![0.0; 1usize << (n + m)];
        for smask in 0..1u64 << n {
            let s = self.spins(smask);
            for bmask in 0..1u64 << m {
                let mut x = 1.0;
                for e in 0..m {
                    let (a, b) = self.graph.ends(e);
                    let open = bmask >> e & 1 == 1;
                    x *= if open {
                        if s.0[a as usize] == s.0[b as usize] {
                            self.probs[e]
                        } else {
                            0.0
                        }
                    } else {
                        1.0 - self.probs[e]
                    };
                    if x == 0.0 {
                        break;
                    }
                }
                w[(smask << m | bmask) as usize] = x;
            }
        }
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= z);
        Ok(w)
    }

    /// Two-step Swendsen–Wang kernel on spins: bonds given spins, then spins given bonds.
    pub fn sw_kernel(&self) -> Result<Vec<Vec<f64>>> {
        self.check_joint()?;
        let n = self.sites.len();
        let m = self.graph.num_edges();
        let spins: Vec<SpinConfig> = (0..1u64 << n).map(|s| self.spins(s)).collect();
        let back: Vec<Vec<f64>> = (0..1u64 << m)
            .map(|b| spins.iter().map(|s| self.spin_given_bond(b, s)).collect())
            .collect();
        let mut k = vec![vec![0.0; 1 << n]; 1 << n];
        for (i, s) in spins.iter().enumerate() {
            for b in 0..1u64 << m {
                let pb = self.bond_given_spin(s, b);
                if pb == 0.0 {
                    continue;
                }
                for (j, &ps) in back[b as usize].iter().enumerate() {
                    k[i][j] += pb * ps;
                }
            }
        }
        Ok(k)
    }
}

fn normalise_log(lw: &mut [f64]) {
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for w in lw.iter_mut() {
        *w = (*w - max).exp();
        z += *w;
    }
    lw.iter_mut().for_each(|w| *w /= z);
}

/// `μ^{J,+}_{Λ,β}` as a table over site masks (bit set = spin `-1`).
pub fn ising_exact(lambda: &LatticeBox, media: &[f64], beta: f64) -> Result<Vec<f64>> {
    IsingSystem::new(lambda, media, beta)?.ising_exact()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_zero_uniform() {
        let lam = LatticeBox::from_ranges(&[(1, 2), (1, 2)]).unwrap();
        let t = ising_exact(&lam, &[1.0; 12], 0.0).unwrap();
        assert!(t.iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn single_site() {
        let lam = LatticeBox::from_ranges(&[(1, 1)]).unwrap();
        let beta = 0.7;
        let t = ising_exact(&lam, &[1.0, 1.0], beta).unwrap();
        let e = (2.0 * beta).exp();
        assert!((t[0] - e / (e + 1.0 / e)).abs() < 1e-14);
    }

    #[test]
    fn joint_marginals() {
        let lam = LatticeBox::from_ranges(&[(1, 2), (1, 1)]).unwrap();
        let media: Vec<f64> = vec![1.0, 0.5, 0.0, 1.0, 0.7, 1.0, 0.3];
        let sys = IsingSystem::new(&lam, &media, 0.8).unwrap();
        let m = sys.graph.num_edges();
        let joint = sys.es_joint_exact().unwrap();
        let mu = sys.ising_exact().unwrap();
        for s in 0..4usize {
            let marg: f64 = (0..1usize << m).map(|b| joint[s << m | b]).sum();
            assert!((marg - mu[s]).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_is_stochastic() {
        let lam = LatticeBox::from_ranges(&[(1, 2), (1, 1)]).unwrap();
        let sys = IsingSystem::new(&lam, &[1.0; 7], 0.5).unwrap();
        for row in sys.sw_kernel().unwrap() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
