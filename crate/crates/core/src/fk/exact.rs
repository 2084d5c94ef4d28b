use rand::Rng;

use super::boundary::{boundary_classes, BoundaryPartition};
use super::config::BondConfig;
use super::params::{DisorderLaw, FkParams};
use crate::lattice::{EdgeSet, Graph, LatticeBox};
use crate::stats::Estimate;
use crate::{error::invalid, Error, Result};

pub const MAX_ENUMERATED_EDGES: usize = 24;
pub const MAX_AVERAGED_WORK: u64 = 10_000_000;

/// Union-find without path compression so that unions can be undone.
struct RollbackUf {
    parent: Vec<u32>,
    rank: Vec<u8>,
    components: usize,
    history: Vec<(u32, u32, bool)>,
}

impl RollbackUf {
    fn new(n: usize) -> Self {
        RollbackUf {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            components: n,
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra as usize] < self.rank[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        let bump = self.rank[ra as usize] == self.rank[rb as usize];
        self.parent[rb as usize] = ra;
        if bump {
            self.rank[ra as usize] += 1;
        }
        self.components -= 1;
        self.history.push((rb, ra, bump));
        true
    }

    fn undo(&mut self) {
        let (child, root, bump) = self.history.pop().expect("undo without union");
        self.parent[child as usize] = child;
        if bump {
            self.rank[root as usize] -= 1;
        }
        self.components += 1;
    }
}

fn check_partition(graph: &Graph, pi: &BoundaryPartition) -> Result<Vec<u32>> {
    let span = graph.boundary_span();
    if span.len() != pi.len() {
        return Err(invalid(
            "boundary partition",
            format!(
                "partition of {} vertices, boundary span has {}",
                pi.len(),
                span.len()
            ),
        ));
    }
    Ok(span)
}

fn wired_uf(graph: &Graph, pi: &BoundaryPartition) -> Result<RollbackUf> {
    let span = check_partition(graph, pi)?;
    let mut uf = RollbackUf::new(graph.num_vertices());
    for block in pi.blocks() {
        for w in block.windows(2) {
            uf.union(span[w[0]], span[w[1]]);
        }
    }
    uf.history.clear();
    Ok(uf)
}

/// `C^π_E(ω)`: clusters of the vertex span with open edges and `π` wiring.
pub fn cluster_count(graph: &Graph, omega: &[bool], pi: &BoundaryPartition) -> Result<usize> {
    if omega.len() != graph.num_edges() {
        return Err(invalid(
            "omega",
            format!("{} states for {} edges", omega.len(), graph.num_edges()),
        ));
    }
    let mut uf = wired_uf(graph, pi)?;
    for (e, &open) in omega.iter().enumerate() {
        if open {
            let (a, b) = graph.ends(e);
            uf.union(a, b);
        }
    }
    Ok(uf.components)
}

fn check_size(m: usize) -> Result<()> {
    if m > MAX_ENUMERATED_EDGES {
        return Err(Error::TooLarge {
            what: "edge count",
            size: m as u64,
            limit: MAX_ENUMERATED_EDGES as u64,
        });
    }
    Ok(())
}

/// Calls `visit(mask, log weight)` for every configuration of positive weight,
/// the weight being `∏ p^ω (1-p)^(1-ω) q^C`.
pub fn for_each_config(
    graph: &Graph,
    probs: &[f64],
    q: f64,
    pi: &BoundaryPartition,
    mut visit: impl FnMut(u64, f64),
) -> Result<()> {
    let m = graph.num_edges();
    check_size(m)?;
    if probs.len() != m {
        return Err(invalid(
            "media",
            format!("{} values for {m} edges", probs.len()),
        ));
    }
    let mut uf = wired_uf(graph, pi)?;
    let lq = q.ln();
    let lp: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let lc: Vec<f64> = probs.iter().map(|p| (-p).ln_1p()).collect();
    fn rec(
        e: usize,
        mask: u64,
        lw: f64,
        g: &Graph,
        probs: &[f64],
        lp: &[f64],
        lc: &[f64],
        lq: f64,
        uf: &mut RollbackUf,
        visit: &mut dyn FnMut(u64, f64),
    ) {
        if e == probs.len() {
            visit(mask, lw + uf.components as f64 * lq);
            return;
        }
        if probs[e] < 1.0 {
            rec(e + 1, mask, lw + lc[e], g, probs, lp, lc, lq, uf, visit);
        }
        if probs[e] > 0.0 {
            let (a, b) = g.ends(e);
            let merged = uf.union(a, b);
            rec(
                e + 1,
                mask | 1 << e,
                lw + lp[e],
                g,
                probs,
                lp,
                lc,
                lq,
                uf,
                visit,
            );
            if merged {
                uf.undo();
            }
        }
    }
    rec(0, 0, 0.0, graph, probs, &lp, &lc, lq, &mut uf, &mut visit);
    Ok(())
}

/// Normalised law of `ω` on an enumerable edge set; bit `e` of an index is `ω_e`.
#[derive(Clone, Debug)]
pub struct ProbabilityTable {
    edges: usize,
    probs: Vec<f64>,
    log_z: f64,
}

impl ProbabilityTable {
    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, mask: u64) -> f64 {
        self.probs[mask as usize]
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }

    pub fn expect(&self, f: impl Fn(u64) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(m, p)| if *p > 0.0 { p * f(m as u64) } else { 0.0 })
            .sum()
    }

    pub fn event(&self, f: impl Fn(u64) -> bool) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(m, _)| f(*m as u64))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn marginal(&self, e: usize) -> f64 {
        self.event(|m| m >> e & 1 == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (BondConfig, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(m, &p)| (BondConfig::from_mask(self.edges, m as u64), p))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (m, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = m;
                if u < acc {
                    return m as u64;
                }
            }
        }
        last as u64
    }
}

/// Table from explicit edge probabilities.
pub fn exact_from_probs(
    graph: &Graph,
    probs: &[f64],
    q: f64,
    pi: &BoundaryPartition,
) -> Result<ProbabilityTable> {
    let m = graph.num_edges();
    check_size(m)?;
    let mut lw = vec![f64::NEG_INFINITY; 1usize << m];
    for_each_config(graph, probs, q, pi, |mask, w| lw[mask as usize] = w)?;
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for w in lw.iter_mut() {
        *w = (*w - max).exp();
        sum += *w;
    }
    for w in lw.iter_mut() {
        *w /= sum;
    }
    Ok(ProbabilityTable {
        edges: m,
        probs: lw,
        log_z: max + sum.ln(),
    })
}

/// `Φ^{J,π}_E` by full enumeration.
pub fn exact_distribution(
    graph: &Graph,
    media: &[f64],
    params: &FkParams,
    pi: &BoundaryPartition,
) -> Result<ProbabilityTable> {
    params.validate()?;
    exact_from_probs(graph, &params.probs(media), params.q, pi)
}

/// Boundary class maximising the probability of `event`, with that probability.
/// Ties keep the earliest class in enumeration order.
pub fn worst_boundary(
    graph: &Graph,
    media: &[f64],
    params: &FkParams,
    event: impl Fn(&BondConfig) -> bool,
) -> Result<(BoundaryPartition, f64)> {
    let m = graph.num_edges();
    check_size(m)?;
    let classes = boundary_classes(graph)?;
    let work = (classes.len() as u64).saturating_mul(1 << m);
    if work > 1 << 32 {
        return Err(Error::TooLarge {
            what: "classes x configurations",
            size: work,
            limit: 1 << 32,
        });
    }
    let indicator: Vec<bool> = (0..1u64 << m)
        .map(|mask| event(&BondConfig::from_mask(m, mask)))
        .collect();
    let probs = params.probs(media);
    let mut best: Option<(BoundaryPartition, f64)> = None;
    for pi in classes {
        let t = exact_from_probs(graph, &probs, params.q, &pi)?;
        let v = t.event(|mask| indicator[mask as usize]);
        if best.as_ref().map_or(true, |(_, b)| v > b + 1e-12) {
            best = Some((pi, v));
        }
    }
    Ok(best.expect("at least one class"))
}

/// Calls `visit(media, weight)` for every assignment of atoms to the edges.
pub fn for_each_media(
    m: usize,
    law: &DisorderLaw,
    mut visit: impl FnMut(&[f64], f64) -> Result<()>,
) -> Result<()> {
    let atoms = law
        .atom_list()
        .ok_or_else(|| invalid("disorder", "exact averaging needs a finite-support law"))?;
    let k = atoms.len();
    let mut idx = vec![0usize; m];
    let mut media: Vec<f64> = vec![atoms[0].value; m];
    loop {
        let w: f64 = idx.iter().map(|&i| atoms[i].weight).product();
        visit(&media, w)?;
        let mut e = 0;
        loop {
            if e == m {
                return Ok(());
            }
            idx[e] += 1;
            if idx[e] < k {
                media[e] = atoms[idx[e]].value;
                break;
            }
            idx[e] = 0;
            media[e] = atoms[0].value;
            e += 1;
        }
    }
}

fn averaged_work(m: usize, law: &DisorderLaw) -> Result<()> {
    let k = law.atom_list().map(|a| a.len()).unwrap_or(0) as f64;
    let work = k.powi(m as i32) * 2f64.powi(m as i32);
    if work > MAX_AVERAGED_WORK as f64 {
        return Err(Error::TooLarge {
            what: "disorder assignments x configurations",
            size: work.min(u64::MAX as f64) as u64,
            limit: MAX_AVERAGED_WORK,
        });
    }
    Ok(())
}

/// `𝔼 Φ^{J,π}_E[f(J, ω)]` over the product law of the couplings.
pub fn exact_averaged(
    graph: &Graph,
    law: &DisorderLaw,
    params: &FkParams,
    pi: &BoundaryPartition,
    f: impl Fn(&[f64], u64) -> f64,
) -> Result<f64> {
    params.validate()?;
    let m = graph.num_edges();
    averaged_work(m, law)?;
    let mut total = 0.0;
    for_each_media(m, law, |media, w| {
        if w == 0.0 {
            return Ok(());
        }
        let t = exact_distribution(graph, media, params, pi)?;
        total += w * t.expect(|mask| f(media, mask));
        Ok(())
    })?;
    Ok(total)
}

/// `𝔼 sup_π Φ^{J,π}_E(event)`: the boundary class is chosen after `J`.
pub fn averaged_worst_boundary(
    graph: &Graph,
    law: &DisorderLaw,
    params: &FkParams,
    event: impl Fn(&BondConfig) -> bool + Copy,
) -> Result<f64> {
    let m = graph.num_edges();
    averaged_work(m, law)?;
    let mut total = 0.0;
    for_each_media(m, law, |media, w| {
        if w > 0.0 {
            total += w * worst_boundary(graph, media, params, event)?.1;
        }
        Ok(())
    })?;
    Ok(total)
}

/// `log Y` with `Y = Σ_ω ∏ (p/(1-p))^ω q^C`.
pub fn log_partition_y(
    graph: &Graph,
    media: &[f64],
    params: &FkParams,
    pi: &BoundaryPartition,
) -> Result<f64> {
    params.validate()?;
    let probs = params.probs(media);
    if let Some(e) = probs.iter().position(|&p| p >= 1.0) {
        return Err(Error::SaturatedEdge(e));
    }
    let shift: f64 = probs.iter().map(|p| (-p).ln_1p()).sum();
    let mut terms = Vec::with_capacity(1 << graph.num_edges().min(MAX_ENUMERATED_EDGES));
    for_each_config(graph, &probs, params.q, pi, |_, w| terms.push(w - shift))?;
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln())
}

pub fn partition_y(
    graph: &Graph,
    media: &[f64],
    params: &FkParams,
    pi: &BoundaryPartition,
) -> Result<f64> {
    log_partition_y(graph, media, params, pi).map(f64::exp)
}

/// Which boundary wiring to use on `E^w(Λ̂_N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wiring {
    Free,
    Wired,
}

impl Wiring {
    pub fn partition(&self, graph: &Graph) -> BoundaryPartition {
        let n = graph.boundary_span().len();
        match self {
            Wiring::Free => BoundaryPartition::free(n),
            Wiring::Wired => BoundaryPartition::wired(n),
        }
    }
}

/// Disorder average of `(2N+1)^{-d} log Y` on `E^w(Λ̂_N)`, `log Y` computed exactly.
pub fn pressure_estimate(
    d: usize,
    n: i32,
    law: &DisorderLaw,
    params: &FkParams,
    wiring: Wiring,
    replicas: usize,
    seed: u64,
) -> Result<Estimate> {
    if replicas == 0 {
        return Err(invalid("replicas", "need at least one replica"));
    }
    let bx = LatticeBox::lambda_hat(d, n)?;
    let graph = Graph::new(&EdgeSet::wired(&bx));
    check_size(graph.num_edges())?;
    let pi = wiring.partition(&graph);
    let vol = bx.len() as f64;
    let mut values = Vec::with_capacity(replicas);
    for r in 0..replicas {
        let mut rng = crate::sampler::replica_rng(seed, r as u64);
        let media = law.sample_media(graph.num_edges(), &mut rng);
        values.push(log_partition_y(&graph, &media, params, &pi)? / vol);
    }
    Ok(Estimate::from_samples(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::params::{p_tilde, Interaction};
    use crate::lattice::{Edge, Point};

    fn pt(c: &[i32]) -> Point {
        Point::new(c).unwrap()
    }

    fn lin(q: f64, slope: f64) -> FkParams {
        FkParams::new(q, Interaction::Linear { slope }).unwrap()
    }

    fn single_edge() -> Graph {
        Graph::new(&EdgeSet::explicit(vec![Edge::new(pt(&[0, 0]), pt(&[1, 0])).unwrap()]).unwrap())
    }

    /// Path x - y - z with x and z wired together.
    fn two_edge() -> (Graph, BoundaryPartition) {
        let (x, y, z) = (pt(&[0, 0]), pt(&[1, 0]), pt(&[2, 0]));
        let g = Graph::new(
            &EdgeSet::explicit(vec![Edge::new(x, y).unwrap(), Edge::new(y, z).unwrap()]).unwrap(),
        );
        let span: Vec<Point> = g.boundary_span().iter().map(|&v| g.vertex(v)).collect();
        assert_eq!(span, vec![x, y, z]);
        (g, BoundaryPartition::from_labels(&[0, 1, 0]))
    }

    #[test]
    fn cluster_count_examples() {
        let b = LatticeBox::from_ranges(&[(1, 2), (1, 2)]).unwrap();
        let g = Graph::new(&EdgeSet::free(&b));
        let free = BoundaryPartition::free(g.boundary_span().len());
        assert_eq!(cluster_count(&g, &[false; 4], &free).unwrap(), 4);

        let b1 = LatticeBox::from_ranges(&[(1, 1)]).unwrap();
        let g1 = Graph::new(&EdgeSet::wired(&b1));
        let w = BoundaryPartition::wired(g1.boundary_span().len());
        assert_eq!(g1.boundary_span().len(), 2);
        assert_eq!(cluster_count(&g1, &[false, false], &w).unwrap(), 2);

        let (g2, pi) = two_edge();
        assert_eq!(cluster_count(&g2, &[false, true], &pi).unwrap(), 1);
        assert_eq!(cluster_count(&g2, &[false, false], &pi).unwrap(), 2);
        assert_eq!(cluster_count(&g2, &[true, true], &pi).unwrap(), 1);
    }

    #[test]
    fn single_edge_marginals() {
        let g = single_edge();
        let params = lin(2.0, 0.6);
        let w = exact_distribution(&g, &[1.0], &params, &BoundaryPartition::wired(2)).unwrap();
        assert!((w.marginal(0) - 0.6).abs() < 1e-14);
        let f = exact_distribution(&g, &[1.0], &params, &BoundaryPartition::free(2)).unwrap();
        assert!((f.marginal(0) - p_tilde(0.6, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn q_one_is_product() {
        let b = LatticeBox::from_ranges(&[(1, 2), (1, 2)]).unwrap();
        let g = Graph::new(&EdgeSet::free(&b));
        let media = [0.2, 0.5, 0.9, 1.0];
        let params = lin(1.0, 0.8);
        let t = exact_distribution(&g, &media, &params, &BoundaryPartition::free(4)).unwrap();
        for mask in 0..16u64 {
            let expect: f64 = (0..4)
                .map(|e| {
                    let p = 0.8 * media[e];
                    if mask >> e & 1 == 1 {
                        p
                    } else {
                        1.0 - p
                    }
                })
                .product();
            assert!((t.prob(mask) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn normalised() {
        let b = LatticeBox::from_ranges(&[(1, 2), (1, 2)]).unwrap();
        let g = Graph::new(&EdgeSet::wired(&b));
        let params = lin(3.5, 0.7);
        let media: Vec<f64> = (0..12).map(|e| (e as f64 + 1.0) / 12.0).collect();
        for pi in [BoundaryPartition::free(8), BoundaryPartition::wired(8)] {
            let t = exact_distribution(&g, &media, &params, &pi).unwrap();
            assert!((t.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn too_large_rejected() {
        let b = LatticeBox::lambda_n(2, 5).unwrap();
        let g = Graph::new(&EdgeSet::wired(&b));
        let err = exact_distribution(
            &g,
            &vec![1.0; g.num_edges()],
            &lin(2.0, 0.5),
            &BoundaryPartition::free(12),
        );
        assert!(matches!(
            err,
            Err(Error::TooLarge { .. }) | Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn worst_boundary_single_edge_is_wired() {
        let g = single_edge();
        let (pi, p) = worst_boundary(&g, &[1.0], &lin(2.0, 0.5), |w| w[0]).unwrap();
        assert!(pi.is_wired());
        assert!((p - 0.5).abs() < 1e-14);
        let (pi, p) = worst_boundary(&g, &[1.0], &lin(2.0, 0.5), |_| true).unwrap();
        assert!(pi.is_wired() && (p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn averaged_counterexample_values() {
        let (g, pi) = two_edge();
        let (lambda, p, q) = (0.5, 0.5, 2.0);
        let law = DisorderLaw::bernoulli(lambda).unwrap();
        let params = lin(q, p);
        let both = exact_averaged(&g, &law, &params, &pi, |_, m| (m == 0b11) as u8 as f64).unwrap();
        let p_hat = p / (1.0 + (1.0 - p) * (1.0 - p) * (q - 1.0));
        assert!((both - lambda * lambda * p * p_hat).abs() < 1e-14);
        let f_open = exact_averaged(&g, &law, &params, &pi, |_, m| (m >> 1 & 1) as f64).unwrap();
        assert!((both / f_open - 3.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn y_examples() {
        let g = single_edge();
        let params = lin(3.0, 0.6);
        let r = 0.6 / 0.4;
        let y = partition_y(&g, &[1.0], &params, &BoundaryPartition::free(2)).unwrap();
        assert!((y - (9.0 + 3.0 * r)).abs() < 1e-12);
        assert!(matches!(
            partition_y(&g, &[1.0], &lin(2.0, 1.0), &BoundaryPartition::free(2)),
            Err(Error::SaturatedEdge(0))
        ));
    }

    #[test]
    fn pressure_dirac_zero() {
        let law = DisorderLaw::dirac(0.0).unwrap();
        let params = lin(2.0, 0.9);
        let f = pressure_estimate(2, 1, &law, &params, Wiring::Free, 2, 7).unwrap();
        // 9 sites plus 12 boundary vertices, all isolated.
        assert!((f.mean - 21.0 * 2f64.ln() / 9.0).abs() < 1e-12);
        let w = pressure_estimate(2, 1, &law, &params, Wiring::Wired, 2, 7).unwrap();
        assert!((w.mean - 10.0 * 2f64.ln() / 9.0).abs() < 1e-12);
    }
}
