use rand::Rng;

use super::es::block_magnetization;
use super::exact::SpinConfig;
use crate::cluster::{crossing_report, isolated_small_clusters};
use crate::lattice::{Covering, EdgeSet, Graph, LatticeBox, Point, SubGraph};
use crate::{error::invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelParams {
    pub delta: f64,
    pub delta_prime: f64,
    pub m_beta: f64,
    /// Largest size of a cluster counted as isolated; `None` for no limit.
    pub isolated_threshold: Option<usize>,
}

impl LabelParams {
    pub fn new(m_beta: f64) -> Self {
        LabelParams {
            delta: 0.1,
            delta_prime: 0.01,
            m_beta,
            isolated_threshold: None,
        }
    }
}

/// The `(L, L)`-covering of `Λ_N` with the sub-graphs a label looks at.
pub struct LabelGeometry {
    pub lambda: LatticeBox,
    pub graph: Graph,
    pub covering: Covering,
    halo: Vec<SubGraph>,
    core: Vec<SubGraph>,
    core_free: Vec<SubGraph>,
}

impl LabelGeometry {
    pub fn new(d: usize, n: i32, l: i32) -> Result<Self> {
        if 3 * l > n + 1 {
            return Err(Error::Covering(format!(
                "need 3L <= N + 1, got L = {l}, N = {n}"
            )));
        }
        let lambda = LatticeBox::lambda_n(d, n)?;
        let graph = Graph::new(&EdgeSet::wired(&lambda));
        let covering = Covering::new(&lambda, l, l)?;
        let halo = covering
            .halos
            .iter()
            .map(|h| graph.subgraph(&EdgeSet::wired(h)))
            .collect();
        let core = covering
            .cores
            .iter()
            .map(|c| graph.subgraph(&EdgeSet::wired(c)))
            .collect();
        let core_free = covering
            .cores
            .iter()
            .map(|c| graph.subgraph(&EdgeSet::free(c)))
            .collect();
        Ok(LabelGeometry {
            lambda,
            graph,
            covering,
            halo,
            core,
            core_free,
        })
    }

    pub fn len(&self) -> usize {
        self.covering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covering.is_empty()
    }

    /// Label of block `k` and the reason it vanishes, if it does.
    pub fn label(
        &self,
        k: usize,
        spins: &SpinConfig,
        omega: &[bool],
        params: &LabelParams,
    ) -> (i8, Option<&'static str>) {
        let l = self.covering.scale;
        let d = self.lambda.dim();
        let vol = (l as f64).powi(d as i32);
        let halo = &self.halo[k];
        let wh = halo.restrict(omega);
        let rep = crossing_report(&halo.graph, &wh, &self.covering.halos[k]);
        let small = (l as f64).cbrt().ceil() as i32;
        if rep.cluster().is_none() {
            return (0, Some("no crossing cluster in the halo"));
        }
        if !rep.unique_large(small) {
            return (0, Some("large cluster in the halo not unique"));
        }
        let core = &self.core[k];
        let box_k = &self.covering.cores[k];
        let wc = core.restrict(omega);
        let rc = crossing_report(&core.graph, &wc, box_k);
        let Some(c) = rc.cluster() else {
            return (0, Some("no crossing cluster in the core"));
        };
        let members: Vec<u32> = rc.decomposition.clusters[c]
            .vertices
            .iter()
            .copied()
            .filter(|&v| box_k.contains(&core.graph.vertex(v)))
            .collect();
        let rel = members.len() as f64 / vol;
        let m = params.m_beta;
        if rel < m * (1.0 - params.delta / 2.0) || rel > m * (1.0 + params.delta / 2.0) {
            return (0, Some("crossing cluster density outside the bracket"));
        }
        if (isolated_small_clusters(&core.graph, &wc, box_k, params.isolated_threshold) as f64)
            < params.delta_prime * vol
        {
            return (0, Some("too few isolated clusters"));
        }
        let spin = |v: u32| -> i8 {
            let p = core.graph.vertex(v);
            spins.0[self.graph.vertex_id(&p).expect("core vertex in Λ ∪ ∂Λ") as usize]
        };
        let free = &self.core_free[k];
        let wf = free.restrict(omega);
        for (e, &open) in wf.iter().enumerate() {
            if open {
                let (a, b) = free.graph.ends(e);
                let (pa, pb) = (free.graph.vertex(a), free.graph.vertex(b));
                let sa = spins.0[self.graph.vertex_id(&pa).unwrap() as usize];
                let sb = spins.0[self.graph.vertex_id(&pb).unwrap() as usize];
                if sa != sb {
                    return (0, Some("spins incompatible with bonds"));
                }
            }
        }
        let eps = spin(members[0]);
        if members.iter().any(|&v| spin(v) != eps) {
            return (0, Some("spin not constant on the crossing cluster"));
        }
        let mag = block_magnetization(&self.graph, spins, &self.covering, k);
        if (mag - m * eps as f64).abs() > params.delta {
            return (0, Some("magnetisation outside the bracket"));
        }
        (eps, None)
    }

    pub fn labels(&self, spins: &SpinConfig, omega: &[bool], params: &LabelParams) -> PhaseLabels {
        let phi = (0..self.len())
            .map(|k| self.label(k, spins, omega, params).0)
            .collect();
        PhaseLabels {
            indices: self.covering.indices.clone(),
            phi,
            params: *params,
        }
    }

    /// Checks the magnetisation bracket, the sign rule between neighbours
    /// (with `+1` outside the index set) and locality of every label, the
    /// latter by recomputing each label after scrambling the spins outside
    /// `Δ_i` and the bonds outside `E^w(Δ'_i)`.
    pub fn check_invariants<R: Rng + ?Sized>(
        &self,
        spins: &SpinConfig,
        omega: &[bool],
        labels: &PhaseLabels,
        rng: &mut R,
    ) -> Result<()> {
        let params = &labels.params;
        for (k, &phi) in labels.phi.iter().enumerate() {
            if phi != 0 {
                let mag = block_magnetization(&self.graph, spins, &self.covering, k);
                if (mag - params.m_beta * phi as f64).abs() > params.delta {
                    return Err(Error::Invariant(format!(
                        "block {}: |M - m φ| = {} > δ",
                        labels.indices[k],
                        (mag - params.m_beta * phi as f64).abs()
                    )));
                }
            }
        }
        let d = self.lambda.dim();
        for (k, i) in labels.indices.iter().enumerate() {
            for axis in 0..d {
                for step in [-1, 1] {
                    let j = i.offset(axis, step);
                    let other = self.covering.position(&j).map_or(1, |kj| labels.phi[kj]);
                    if labels.phi[k] * other < 0 {
                        return Err(Error::Invariant(format!("φ{} φ{} < 0", i, j)));
                    }
                }
            }
        }
        for k in 0..self.len() {
            let core = &self.covering.cores[k];
            let mut s = spins.clone();
            for (v, p) in self.graph.vertices().iter().enumerate() {
                if !core.contains(p) {
                    s.0[v] = if rng.gen::<bool>() { 1 } else { -1 };
                }
            }
            let mut w: Vec<bool> = (0..omega.len()).map(|_| rng.gen()).collect();
            for &e in self.halo[k].parent_edges.iter().flatten() {
                w[e as usize] = omega[e as usize];
            }
            let again = self.label(k, &s, &w, params).0;
            if again != labels.phi[k] {
                return Err(Error::Invariant(format!(
                    "label of block {} changed from {} to {again} under outside changes",
                    labels.indices[k], labels.phi[k]
                )));
            }
        }
        Ok(())
    }
}

/// `φ_i ∈ {-1, 0, 1}` for every block of the covering.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseLabels {
    pub indices: Vec<Point>,
    pub phi: Vec<i8>,
    pub params: LabelParams,
}

impl PhaseLabels {
    pub fn count(&self, v: i8) -> usize {
        self.phi.iter().filter(|&&p| p == v).count()
    }
}

/// Labels for a configuration on `E^w(Λ_N)`.
pub fn phase_labels(
    spins: &SpinConfig,
    omega: &[bool],
    d: usize,
    n: i32,
    l: i32,
    params: &LabelParams,
) -> Result<PhaseLabels> {
    let geom = LabelGeometry::new(d, n, l)?;
    if omega.len() != geom.graph.num_edges() || spins.0.len() != geom.graph.num_vertices() {
        return Err(invalid("configuration", "sizes differ from E^w(Λ_N)"));
    }
    Ok(geom.labels(spins, omega, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::substream;

    #[test]
    fn closed_bonds_give_zero_labels() {
        let geom = LabelGeometry::new(2, 13, 4).unwrap();
        let s = SpinConfig(vec![1; geom.graph.num_vertices()]);
        let w = vec![false; geom.graph.num_edges()];
        let lab = geom.labels(&s, &w, &LabelParams::new(0.9));
        assert!(lab.phi.iter().all(|&p| p == 0));
        geom.check_invariants(&s, &w, &lab, &mut substream(0, 0, 0))
            .unwrap();
    }

    #[test]
    fn full_plus_configuration() {
        // every bond open: one cluster of density 1 and no isolated clusters
        let geom = LabelGeometry::new(2, 13, 4).unwrap();
        let s = SpinConfig(vec![1; geom.graph.num_vertices()]);
        let w = vec![true; geom.graph.num_edges()];
        let mut p = LabelParams::new(1.0);
        p.delta_prime = 0.0;
        let lab = geom.labels(&s, &w, &p);
        assert!(lab.phi.iter().all(|&x| x == 1));
        geom.check_invariants(&s, &w, &lab, &mut substream(0, 0, 0))
            .unwrap();
    }

    #[test]
    fn covering_constraint() {
        assert!(LabelGeometry::new(2, 10, 4).is_err());
        // 3L <= N + 1 holds but the box Λ_N has side N - 1 < 3L
        assert!(LabelGeometry::new(2, 12, 4).is_err());
    }
}
