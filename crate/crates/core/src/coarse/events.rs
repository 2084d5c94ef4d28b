use super::seeds::find_seed;
use crate::cluster::{doubly_connected_set, horizontal_interface, UnionFind};
use crate::fk::DisorderLaw;
use crate::lattice::{Block, EdgeSet, Facet, Graph, LatticeBox, Point};
use crate::{error::invalid, Result};

/// Facet size `⌊(δ ln L)^{1/d}⌋` used by `ℰ^L`.
pub fn facet_scale(l: i32, delta: f64, d: usize) -> Result<i32> {
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("need delta > 0, got {delta}")));
    }
    let h = (delta * (l as f64).ln()).powf(1.0 / d as f64).floor();
    if h < 1.0 {
        return Err(invalid(
            "delta",
            format!("facet size (δ ln L)^(1/d) = {h} < 1 for L = {l}"),
        ));
    }
    Ok(h as i32)
}

fn check_index(lambda: &LatticeBox, i: &Point, l: i32) -> Result<()> {
    let a = lambda.admissible_factors(l)?;
    if i.dim() != a.len() || (0..a.len()).any(|k| i[k] < 0 || i[k] >= a[k]) {
        return Err(invalid(
            "block index",
            format!("{i} not in the index set at scale {l}"),
        ));
    }
    Ok(())
}

/// Seeds of the `2d` faces of a block, in face order, and the `ℰ^{L,H}` flag.
pub fn seeds_and_event(
    graph: &Graph,
    omega: &[bool],
    lambda: &LatticeBox,
    i: &Point,
    l: i32,
    h: i32,
) -> Result<(Vec<Option<Facet>>, bool)> {
    if h < 1 {
        return Err(invalid("H", "facet size must be >= 1"));
    }
    check_index(lambda, i, l)?;
    let d = lambda.dim();
    let block = Block::new(*i, l);
    let seeds: Vec<Option<Facet>> = (0..2 * d)
        .map(|f| find_seed(graph, omega, lambda, &block, f / 2, f % 2 == 1, h))
        .collect();
    if seeds.iter().any(|s| s.is_none()) {
        return Ok((seeds, false));
    }
    // clusters of ω restricted to E^f(B^L_i) ∩ E^w(Λ)
    let closed = block.closed();
    let mut uf = UnionFind::new(closed.len() as usize);
    for x in closed.iter() {
        for k in 0..d {
            let y = x.offset(k, 1);
            if !closed.contains(&y) {
                continue;
            }
            if let Some(e) = graph.edge_id(&x, &y) {
                if omega[e] {
                    uf.union(
                        closed.index_of(&x).unwrap() as u32,
                        closed.index_of(&y).unwrap() as u32,
                    );
                }
            }
        }
    }
    let roots = |f: &Facet, uf: &mut UnionFind| -> Vec<u32> {
        let mut r: Vec<u32> = f
            .region()
            .iter()
            .map(|p| uf.find(closed.index_of(&p).expect("facets lie in the closed block") as u32))
            .collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let mut common = roots(seeds[0].as_ref().unwrap(), &mut uf);
    for s in &seeds[1..] {
        let r = roots(s.as_ref().unwrap(), &mut uf);
        common.retain(|x| r.binary_search(x).is_ok());
        if common.is_empty() {
            break;
        }
    }
    let holds = !common.is_empty();
    Ok((seeds, holds))
}

/// `ℰ^{L,H}_i`: every face owns a seed and the seeds share one cluster of `ω|E^L_i`.
pub fn event_e_lh(
    graph: &Graph,
    omega: &[bool],
    lambda: &LatticeBox,
    i: &Point,
    l: i32,
    h: i32,
) -> Result<bool> {
    seeds_and_event(graph, omega, lambda, i, l, h).map(|r| r.1)
}

/// `ℰ^L_i` with `H = ⌊(δ ln L)^{1/d}⌋`.
pub fn event_e_l(
    graph: &Graph,
    omega: &[bool],
    lambda: &LatticeBox,
    i: &Point,
    l: i32,
    delta: f64,
) -> Result<bool> {
    let h = facet_scale(l, delta, lambda.dim())?;
    event_e_lh(graph, omega, lambda, i, l, h)
}

/// `𝒟^L_i`: `ℰ^{L/3}_j` for every `j ∈ 3i + {0,1,2}^d`.
pub fn event_d(
    graph: &Graph,
    omega: &[bool],
    lambda: &LatticeBox,
    i: &Point,
    l: i32,
    delta: f64,
) -> Result<bool> {
    if l % 3 != 0 {
        return Err(invalid("L", format!("{l} is not divisible by 3")));
    }
    check_index(lambda, i, l)?;
    let d = lambda.dim();
    let sub = LatticeBox::from_ranges(&vec![(0, 2); d])?;
    for off in sub.iter() {
        let j = *i * 3 + off;
        if !event_e_l(graph, omega, lambda, &j, l / 3, delta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cutoff `ε_L`: the largest `ε <= 1` among the positive atoms and 1 with
/// `ℙ(0 < J < ε) <= e^{-L}`.
#[derive(Clone, Debug)]
pub struct CutoffPolicy {
    law: DisorderLaw,
}

impl CutoffPolicy {
    pub fn new(law: &DisorderLaw) -> Result<Self> {
        if law.atom_list().is_none() {
            return Err(invalid("disorder", "cutoff needs a finite-support law"));
        }
        Ok(CutoffPolicy { law: law.clone() })
    }

    pub fn epsilon(&self, l: i32) -> f64 {
        let atoms = self.law.atom_list().expect("checked in new");
        let bound = (-(l as f64)).exp();
        let mut candidates: Vec<f64> = atoms.iter().map(|a| a.value).filter(|&v| v > 0.0).collect();
        candidates.push(1.0);
        candidates.sort_by(|a, b| b.total_cmp(a));
        candidates.dedup();
        for eps in candidates {
            let mass: f64 = atoms
                .iter()
                .filter(|a| a.value > 0.0 && a.value < eps)
                .map(|a| a.weight)
                .sum();
            if mass <= bound {
                return eps;
            }
        }
        unreachable!("the smallest positive candidate has zero mass below it")
    }
}

pub fn cutoff_epsilon(law: &DisorderLaw, l: i32) -> Result<f64> {
    Ok(CutoffPolicy::new(law)?.epsilon(l))
}

/// `𝒢^L_i`: (a) exactly one `J`-open cluster of `E^w(B^{L,1}_i)` has diameter
/// at least `L`; (b) no coupling of `E^w(B^{L,3}_i)` lies in `(0, ε_L)`.
pub fn event_g(
    graph: &Graph,
    media: &[f64],
    lambda: &LatticeBox,
    i: &Point,
    l: i32,
    eps: f64,
) -> Result<bool> {
    let block = Block::new(*i, l);
    let b3 = block
        .enlarged(3, lambda)
        .ok_or_else(|| invalid("block index", format!("{i} misses the box")))?;
    for e in EdgeSet::wired(&b3).iter() {
        let j = graph.edge_id(&e.a(), &e.b()).map_or(0.0, |id| media[id]);
        if j > 0.0 && j < eps {
            return Ok(false);
        }
    }
    let b1 = block.enlarged(1, lambda).expect("B^{L,1} inside B^{L,3}");
    let span = b1.expand(1)?;
    let mut uf = UnionFind::new(span.len() as usize);
    for e in EdgeSet::wired(&b1).iter() {
        let j = graph.edge_id(&e.a(), &e.b()).map_or(0.0, |id| media[id]);
        if j > 0.0 {
            uf.union(
                span.index_of(&e.a()).unwrap() as u32,
                span.index_of(&e.b()).unwrap() as u32,
            );
        }
    }
    let d = lambda.dim();
    let n = span.len() as usize;
    let mut lo = vec![[i32::MAX; 4]; n];
    let mut hi = vec![[i32::MIN; 4]; n];
    let mut present = vec![false; n];
    for v in EdgeSet::wired(&b1).vertices() {
        let r = uf.find(span.index_of(&v).unwrap() as u32) as usize;
        present[r] = true;
        for k in 0..d {
            lo[r][k] = lo[r][k].min(v[k]);
            hi[r][k] = hi[r][k].max(v[k]);
        }
    }
    let large = (0..n)
        .filter(|&r| present[r] && (0..d).map(|k| hi[r][k] - lo[r][k]).max().unwrap_or(0) >= l)
        .count();
    Ok(large == 1)
}

/// All flags for one block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockEventReport {
    pub index: Point,
    pub seeds: Vec<Option<Facet>>,
    pub e: bool,
    pub d: Option<bool>,
    pub g: bool,
    /// `𝒯 = 𝒟 ∧ 𝒢`, when `𝒟` is defined.
    pub t: Option<bool>,
}

pub fn block_report(
    graph: &Graph,
    omega: &[bool],
    media: &[f64],
    lambda: &LatticeBox,
    i: &Point,
    l: i32,
    delta: f64,
    eps: f64,
) -> Result<BlockEventReport> {
    let h = facet_scale(l, delta, lambda.dim())?;
    let (seeds, e) = seeds_and_event(graph, omega, lambda, i, l, h)?;
    let d = if l % 3 == 0 {
        Some(event_d(graph, omega, lambda, i, l, delta)?)
    } else {
        None
    };
    let g = event_g(graph, media, lambda, i, l, eps)?;
    Ok(BlockEventReport {
        index: *i,
        seeds,
        e,
        d,
        g,
        t: d.map(|d| d && g),
    })
}

/// Outcome of `ℒ`: the qualifying block set and whether it is an interface.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceEvent {
    pub holds: bool,
    pub qualifying: Vec<Point>,
}

/// Index region `{0..n-1}^{d-1} × {1..⌈ln n⌉-1}` of the interface event.
pub fn interface_region(d: usize, n: i32) -> Result<LatticeBox> {
    let top = (n as f64).ln().ceil() as i32 - 1;
    if n < 1 || top < 1 {
        return Err(invalid("n", format!("need ⌈ln n⌉ >= 2, got n = {n}")));
    }
    let mut r = vec![(0, n - 1); d];
    r[d - 1] = (1, top);
    LatticeBox::from_ranges(&r)
}

/// `ℒ` on `Λ^log_{n,L}`: blocks meeting `C²_o` whose couplings are `𝒢`-good
/// form a horizontal interface. `graph` is `E^w(Λ^log_{n,L})`.
pub fn event_l(
    graph: &Graph,
    media: &[f64],
    omega: &[bool],
    n: i32,
    l: i32,
    eps: f64,
) -> Result<InterfaceEvent> {
    let d = graph.dim();
    let lambda = LatticeBox::log_slab(d, n, l)?;
    let region = interface_region(d, n)?;
    let o = Point::splat(d, 1)?;
    let o_id = graph
        .vertex_id(&o)
        .ok_or_else(|| invalid("graph", "graph is not E^w of the logarithmic slab"))?;
    let c2 = doubly_connected_set(graph, omega, o_id);
    let c2_points: Vec<Point> = c2.iter().map(|&v| graph.vertex(v)).collect();
    let mut qualifying = Vec::new();
    for i in region.iter() {
        let b = Block::new(i, l).closed();
        if !c2_points.iter().any(|p| b.contains(p)) {
            continue;
        }
        if event_g(graph, media, &lambda, &i, l, eps)? {
            qualifying.push(i);
        }
    }
    let holds = horizontal_interface(&qualifying, &region);
    Ok(InterfaceEvent { holds, qualifying })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(l: i32, a: &[i32]) -> (LatticeBox, Graph) {
        let lam = LatticeBox::admissible(l, a).unwrap();
        (lam, Graph::new(&EdgeSet::wired(&lam)))
    }

    #[test]
    fn facet_scale_values() {
        assert_eq!(facet_scale(100, 1.0, 2).unwrap(), 2);
        assert!(facet_scale(2, 0.1, 2).is_err());
    }

    #[test]
    fn all_open_and_all_closed() {
        let (lam, g) = setup(9, &[3, 3]);
        let i = Point::new(&[1, 1]).unwrap();
        let open = vec![true; g.num_edges()];
        let closed = vec![false; g.num_edges()];
        assert!(event_e_lh(&g, &open, &lam, &i, 9, 2).unwrap());
        assert!(!event_e_lh(&g, &closed, &lam, &i, 9, 2).unwrap());
        assert!(event_d(&g, &open, &lam, &i, 9, 3.0).unwrap());
        assert!(event_d(&g, &open, &lam, &i, 8, 3.0).is_err());
    }

    #[test]
    fn cutoffs() {
        let b = DisorderLaw::bernoulli(0.4).unwrap();
        for l in 1..=64 {
            assert_eq!(cutoff_epsilon(&b, l).unwrap(), 1.0);
        }
        let a = DisorderLaw::atoms(&[(0.0, 0.3), (0.5, 0.2), (1.0, 0.5)]).unwrap();
        assert_eq!(cutoff_epsilon(&a, 1).unwrap(), 1.0);
        assert_eq!(cutoff_epsilon(&a, 2).unwrap(), 0.5);
    }

    #[test]
    fn g_event_extremes() {
        let (lam, g) = setup(4, &[3, 3]);
        let i = Point::new(&[1, 1]).unwrap();
        assert!(event_g(&g, &vec![1.0; g.num_edges()], &lam, &i, 4, 1.0).unwrap());
        assert!(!event_g(&g, &vec![0.0; g.num_edges()], &lam, &i, 4, 1.0).unwrap());
        assert!(!event_g(&g, &vec![0.5; g.num_edges()], &lam, &i, 4, 1.0).unwrap());
    }

    #[test]
    fn interface_extremes() {
        let (n, l) = (8, 3);
        let lam = LatticeBox::log_slab(2, n, l).unwrap();
        let g = Graph::new(&EdgeSet::wired(&lam));
        let m = g.num_edges();
        let full = event_l(&g, &vec![1.0; m], &vec![true; m], n, l, 1.0).unwrap();
        assert!(full.holds);
        let empty = event_l(&g, &vec![1.0; m], &vec![false; m], n, l, 1.0).unwrap();
        assert!(!empty.holds);
    }
}
