use std::collections::BTreeSet;

use rayon::prelude::*;

use super::upsets::{
    domination_margin, fkg_pairs_margin, holley_margin, lattice_condition_margin, product_table,
    up_sets, MAX_UPSET_EDGES,
};
use crate::cluster::UnionFind;
use crate::fk::{boundary_classes, exact_from_probs, p_tilde, BoundaryPartition, FkParams};
use crate::lattice::{Edge, EdgeSet, Graph, Point};
use crate::{error::invalid, Result};

/// Worst margin of one inequality over one instance; negative beyond the
/// tolerance is a violation.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub instance: String,
    pub inequality: &'static str,
    pub margin: f64,
    pub tolerance: f64,
    pub checks: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.margin >= -self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: f64,
    /// Edge count up to which inequalities are also checked on every up-set.
    pub exhaustive_edges: usize,
    /// Boundary classes to use; all of them when `None`.
    pub classes: Option<Vec<BoundaryPartition>>,
    /// Amount by which one edge probability is raised in the monotonicity check.
    pub p_step: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerance: 1e-12,
            exhaustive_edges: 4,
            classes: None,
            p_step: 0.1,
        }
    }
}

struct Collector {
    instance: String,
    tolerance: f64,
    reports: Vec<VerificationReport>,
}

impl Collector {
    fn add(&mut self, inequality: &'static str, margin: f64) {
        match self.reports.iter_mut().find(|r| r.inequality == inequality) {
            Some(r) => {
                r.margin = r.margin.min(margin);
                r.checks += 1;
            }
            None => self.reports.push(VerificationReport {
                instance: self.instance.clone(),
                inequality,
                margin,
                tolerance: self.tolerance,
                checks: 1,
            }),
        }
    }
}

/// FKG, monotonicity in the boundary condition and in `p`, the comparison
/// with Bernoulli percolation and the quenched DLR property, checked by
/// enumeration on `graph` with couplings `media`.
pub fn verify_inequalities(
    graph: &Graph,
    media: &[f64],
    params: &FkParams,
    options: &VerifyOptions,
) -> Result<Vec<VerificationReport>> {
    params.validate()?;
    if media.len() != graph.num_edges() {
        return Err(invalid("media", "length differs from edge count"));
    }
    let probs = params.probs(media);
    let name = format!(
        "{} edges, q = {}, p = {:?}",
        graph.num_edges(),
        params.q,
        probs
    );
    verify_probs(graph, &probs, params.q, name, options)
}

pub(crate) fn verify_probs(
    graph: &Graph,
    probs: &[f64],
    q: f64,
    instance: String,
    options: &VerifyOptions,
) -> Result<Vec<VerificationReport>> {
    let m = graph.num_edges();
    if m > MAX_UPSET_EDGES {
        return Err(crate::Error::TooLarge {
            what: "edges for inequality verification",
            size: m as u64,
            limit: MAX_UPSET_EDGES as u64,
        });
    }
    if q < 1.0 {
        return Err(invalid("q", "correlation inequalities need q >= 1"));
    }
    let classes = match &options.classes {
        Some(c) => c.clone(),
        None => boundary_classes(graph)?,
    };
    let exhaustive = m <= options.exhaustive_edges;
    let ups = if exhaustive { up_sets(m)? } else { Vec::new() };
    let mut out = Collector {
        instance,
        tolerance: options.tolerance,
        reports: Vec::new(),
    };
    let tables = classes
        .iter()
        .map(|pi| exact_from_probs(graph, probs, q, pi).map(|t| t.probs().to_vec()))
        .collect::<Result<Vec<_>>>()?;

    let upper = product_table(probs);
    let tilde: Vec<f64> = probs.iter().map(|&p| p_tilde(p, q)).collect();
    let lower = product_table(&tilde);
    for t in &tables {
        out.add("fkg-lattice-condition", lattice_condition_margin(t));
        out.add("percolation-upper-holley", holley_margin(t, &upper));
        out.add("percolation-lower-holley", holley_margin(&lower, t));
        if exhaustive {
            out.add("fkg-up-set-pairs", fkg_pairs_margin(t, &ups)?);
            out.add("percolation-upper", domination_margin(t, &upper, &ups)?);
            out.add("percolation-lower", domination_margin(&lower, t, &ups)?);
        }
    }

    for (i, a) in classes.iter().enumerate() {
        for (j, b) in classes.iter().enumerate() {
            if i != j && a.refines(b) {
                out.add("monotone-pi-holley", holley_margin(&tables[i], &tables[j]));
                if exhaustive {
                    out.add(
                        "monotone-pi",
                        domination_margin(&tables[i], &tables[j], &ups)?,
                    );
                }
            }
        }
    }

    for (pi, t) in classes.iter().zip(&tables) {
        for e in 0..m {
            let mut raised = probs.to_vec();
            raised[e] = (raised[e] + options.p_step).min(1.0);
            let hi = exact_from_probs(graph, &raised, q, pi)?;
            out.add("monotone-p-holley", holley_margin(t, hi.probs()));
            if exhaustive {
                out.add("monotone-p", domination_margin(t, hi.probs(), &ups)?);
            }
        }
    }

    let dlr = DlrSubsets::new(graph)?;
    for (pi, t) in classes.iter().zip(&tables) {
        out.add("quenched-dlr", -dlr.max_deviation(graph, probs, q, pi, t)?);
    }
    Ok(out.reports)
}

/// Every nonempty proper subset `E'` of the edges, as a graph of its own.
struct DlrSubsets {
    subsets: Vec<(u64, Graph, Vec<u32>)>,
}

impl DlrSubsets {
    fn new(graph: &Graph) -> Result<Self> {
        let m = graph.num_edges();
        let full = (1u64 << m) - 1;
        let mut subsets = Vec::new();
        for s in 1..full {
            let edges: Vec<Edge> = (0..m)
                .filter(|e| s >> e & 1 == 1)
                .map(|e| graph.edge(e))
                .collect();
            let sub = Graph::new(&EdgeSet::explicit(edges)?);
            let parent: Vec<u32> = sub
                .vertices()
                .iter()
                .map(|p| graph.vertex_id(p).expect("subset vertex"))
                .collect();
            subsets.push((s, sub, parent));
        }
        Ok(DlrSubsets { subsets })
    }

    /// Largest gap between `Φ^π_E(· | ω = ξ off E')` and `Φ^{π_ξ}_{E'}`.
    fn max_deviation(
        &self,
        graph: &Graph,
        probs: &[f64],
        q: f64,
        pi: &BoundaryPartition,
        table: &[f64],
    ) -> Result<f64> {
        let m = graph.num_edges();
        let span = graph.boundary_span();
        let mut worst: f64 = 0.0;
        let mut uf = UnionFind::new(graph.num_vertices());
        for (s, sub, parent) in &self.subsets {
            let inside: Vec<usize> = (0..m).filter(|e| s >> e & 1 == 1).collect();
            let outside: Vec<usize> = (0..m).filter(|e| s >> e & 1 == 0).collect();
            let sub_probs: Vec<f64> = inside.iter().map(|&e| probs[e]).collect();
            let sub_span = sub.boundary_span();
            for xi in 0..1u64 << outside.len() {
                let mut base = 0u64;
                for (k, &e) in outside.iter().enumerate() {
                    if xi >> k & 1 == 1 {
                        base |= 1 << e;
                    }
                }
                let spread = |w: u64| -> u64 {
                    let mut mask = base;
                    for (k, &e) in inside.iter().enumerate() {
                        if w >> k & 1 == 1 {
                            mask |= 1 << e;
                        }
                    }
                    mask
                };
                let total: f64 = (0..1u64 << inside.len())
                    .map(|w| table[spread(w) as usize])
                    .sum();
                if total <= 0.0 {
                    continue;
                }
                uf.reset();
                for block in pi.blocks() {
                    for w in block.windows(2) {
                        uf.union(span[w[0]], span[w[1]]);
                    }
                }
                for &e in &outside {
                    if base >> e & 1 == 1 {
                        let (a, b) = graph.ends(e);
                        uf.union(a, b);
                    }
                }
                let labels: Vec<u32> = sub_span
                    .iter()
                    .map(|&v| uf.find(parent[v as usize]))
                    .collect();
                let induced = BoundaryPartition::from_labels(&labels);
                let local = exact_from_probs(sub, &sub_probs, q, &induced)?;
                for w in 0..1u64 << inside.len() {
                    worst = worst.max((table[spread(w) as usize] / total - local.prob(w)).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Connected edge sets of `Z²` with at most `max_edges` edges, one per
/// class under translations, rotations and reflections.
pub fn bond_animals(max_edges: usize) -> Vec<EdgeSet> {
    type Shape = Vec<(i32, i32, i32, i32)>;
    fn canonical(edges: &[(i32, i32, i32, i32)]) -> Shape {
        let maps: [fn(i32, i32) -> (i32, i32); 8] = [
            |x, y| (x, y),
            |x, y| (-x, y),
            |x, y| (x, -y),
            |x, y| (-x, -y),
            |x, y| (y, x),
            |x, y| (-y, x),
            |x, y| (y, -x),
            |x, y| (-y, -x),
        ];
        maps.iter()
            .map(|f| {
                let mut v: Shape = edges
                    .iter()
                    .map(|&(a, b, c, d)| {
                        let (p, q) = (f(a, b), f(c, d));
                        if p <= q {
                            (p.0, p.1, q.0, q.1)
                        } else {
                            (q.0, q.1, p.0, p.1)
                        }
                    })
                    .collect();
                let mx = v.iter().map(|e| e.0.min(e.2)).min().unwrap();
                let my = v.iter().map(|e| e.1.min(e.3)).min().unwrap();
                for e in v.iter_mut() {
                    *e = (e.0 - mx, e.1 - my, e.2 - mx, e.3 - my);
                }
                v.sort_unstable();
                v
            })
            .min()
            .unwrap()
    }
    let mut level: BTreeSet<Shape> = BTreeSet::new();
    let mut all: Vec<Shape> = Vec::new();
    if max_edges == 0 {
        return Vec::new();
    }
    level.insert(vec![(0, 0, 1, 0)]);
    for _ in 0..max_edges {
        all.extend(level.iter().cloned());
        let mut next = BTreeSet::new();
        for shape in &level {
            let verts: BTreeSet<(i32, i32)> = shape
                .iter()
                .flat_map(|e| [(e.0, e.1), (e.2, e.3)])
                .collect();
            for &(x, y) in &verts {
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (u, v) = (x + dx, y + dy);
                    let e = if (x, y) <= (u, v) {
                        (x, y, u, v)
                    } else {
                        (u, v, x, y)
                    };
                    if !shape.contains(&e) {
                        let mut grown = shape.clone();
                        grown.push(e);
                        next.insert(canonical(&grown));
                    }
                }
            }
        }
        level = next;
    }
    all.into_iter()
        .map(|s| {
            let edges = s
                .iter()
                .map(|&(a, b, c, d)| {
                    Edge::new(Point::new(&[a, b]).unwrap(), Point::new(&[c, d]).unwrap()).unwrap()
                })
                .collect();
            EdgeSet::explicit(edges).expect("planar edges")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusOptions {
    pub max_edges: usize,
    pub p_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub verify: VerifyOptions,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            max_edges: 5,
            p_grid: (1..=9).map(|k| k as f64 / 10.0).collect(),
            q_grid: vec![1.0, 1.5, 2.0, 4.0],
            verify: VerifyOptions::default(),
        }
    }
}

/// Reports for every bond animal and every uniform `(p, q)` of the grid, in
/// a fixed order.
pub fn verify_corpus(options: &CorpusOptions) -> Result<Vec<VerificationReport>> {
    let animals = bond_animals(options.max_edges);
    let jobs: Vec<(usize, f64, f64)> = (0..animals.len())
        .flat_map(|a| {
            options
                .p_grid
                .iter()
                .flat_map(move |&p| options.q_grid.iter().map(move |&q| (a, p, q)))
        })
        .collect();
    let graphs: Vec<Graph> = animals.iter().map(Graph::new).collect();
    let nested = jobs
        .par_iter()
        .map(|&(a, p, q)| {
            let g = &graphs[a];
            let name = format!("animal {a} ({} edges), p = {p}, q = {q}", g.num_edges());
            verify_probs(g, &vec![p; g.num_edges()], q, name, &options.verify)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::Interaction;

    #[test]
    fn animal_counts() {
        let a = bond_animals(5);
        let by_size: Vec<usize> = (1..=5)
            .map(|k| a.iter().filter(|s| s.len() == k).count())
            .collect();
        assert_eq!(by_size, vec![1, 2, 5, 16, 55]);
    }

    fn path(n: i32) -> Graph {
        let edges = (0..n)
            .map(|x| {
                Edge::new(
                    Point::new(&[x, 0]).unwrap(),
                    Point::new(&[x + 1, 0]).unwrap(),
                )
                .unwrap()
            })
            .collect();
        Graph::new(&EdgeSet::explicit(edges).unwrap())
    }

    #[test]
    fn single_edge_all_pass() {
        let g = path(1);
        let params = FkParams::new(2.0, Interaction::Linear { slope: 1.0 }).unwrap();
        let r = verify_inequalities(&g, &[0.6], &params, &VerifyOptions::default()).unwrap();
        assert!(r.iter().all(|x| x.passed()), "{r:?}");
        // the free class sits exactly on the lower bound
        let low = r
            .iter()
            .find(|x| x.inequality == "percolation-lower")
            .unwrap();
        assert!(low.margin.abs() < 1e-15);
    }

    #[test]
    fn five_edge_tree() {
        let edges = vec![
            ((0, 0), (1, 0)),
            ((1, 0), (2, 0)),
            ((1, 0), (1, 1)),
            ((1, 1), (1, 2)),
            ((2, 0), (2, -1)),
        ]
        .into_iter()
        .map(|(a, b)| {
            Edge::new(
                Point::new(&[a.0, a.1]).unwrap(),
                Point::new(&[b.0, b.1]).unwrap(),
            )
            .unwrap()
        })
        .collect();
        let g = Graph::new(&EdgeSet::explicit(edges).unwrap());
        let opts = VerifyOptions {
            exhaustive_edges: 5,
            classes: Some(vec![
                BoundaryPartition::wired(6),
                BoundaryPartition::free(6),
            ]),
            ..Default::default()
        };
        let r = verify_probs(&g, &[0.5; 5], 2.0, "tree".into(), &opts).unwrap();
        assert!(r.iter().all(|x| x.passed()), "{r:?}");
        assert!(r.iter().any(|x| x.inequality == "fkg-up-set-pairs"));
    }

    #[test]
    fn harris_at_q_one() {
        let g = path(3);
        let r = verify_probs(
            &g,
            &[0.3, 0.5, 0.7],
            1.0,
            "path".into(),
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(r.iter().all(|x| x.passed()));
        // q = 1: every boundary class gives the same product law
        let m = r.iter().find(|x| x.inequality == "monotone-pi").unwrap();
        assert!(m.margin.abs() < 1e-15);
    }

    #[test]
    fn dlr_detects_a_wrong_table() {
        let g = path(2);
        let pi = BoundaryPartition::free(3);
        let mut t = exact_from_probs(&g, &[0.5, 0.5], 2.0, &pi)
            .unwrap()
            .probs()
            .to_vec();
        let dlr = DlrSubsets::new(&g).unwrap();
        assert!(dlr.max_deviation(&g, &[0.5, 0.5], 2.0, &pi, &t).unwrap() < 1e-14);
        t.swap(1, 3);
        assert!(dlr.max_deviation(&g, &[0.5, 0.5], 2.0, &pi, &t).unwrap() > 1e-3);
    }
}
