use rand::seq::SliceRandom;
use rand::Rng;

use crate::cluster::UnionFind;
use crate::fk::{BoundaryPartition, FkParams};
use crate::lattice::{EdgeSet, Graph, LatticeBox, Point};
use crate::sampler::{run_chain, substream, Schedule};
use crate::stats::Estimate;
use crate::{error::invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOptions {
    /// Bottom sites examined (sampled without replacement).
    pub sites: usize,
    /// Random wirings of `∂S` tried besides free and wired.
    pub random_wirings: usize,
    pub schedule: Schedule,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            sites: 4,
            random_wirings: 2,
            schedule: Schedule::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeCase {
    pub site: Point,
    pub wiring: String,
    /// Whether the lower half-space edges are all open.
    pub lower_open: bool,
    pub estimate: Estimate,
}

/// Diagnostic estimate of the good-slab criterion: the smallest estimated
/// `Φ^{J,π}(x ↔ o or x ↮ Top)` over the sampled cases. Not a certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub cases: Vec<ProbeCase>,
    pub minimum: f64,
}

/// `media` lives on `E^w(Λ^log_{n,L})`.
pub fn j_good_slab_probe(
    media: &[f64],
    d: usize,
    n: i32,
    l: i32,
    params: &FkParams,
    options: &ProbeOptions,
) -> Result<ProbeReport> {
    let slab = LatticeBox::log_slab(d, n, l)?;
    let graph = Graph::new(&EdgeSet::wired(&slab));
    if media.len() != graph.num_edges() {
        return Err(invalid("media", "length differs from E^w of the slab"));
    }
    if options.sites == 0 {
        return Err(invalid("sites", "need at least one site"));
    }
    let top = slab.upper()[d - 1] + 1;
    let o = graph
        .vertex_id(&Point::splat(d, 1)?)
        .expect("o lies in the slab");
    let mut bottom: Vec<u32> = (0..graph.num_vertices() as u32)
        .filter(|&v| graph.vertex(v)[d - 1] == 0)
        .collect();
    let mut rng = substream(options.seed, 0, 0);
    bottom.shuffle(&mut rng);
    bottom.truncate(options.sites);
    bottom.sort_unstable();

    let span = graph.boundary_span();
    let mut wirings = vec![
        ("free".to_string(), BoundaryPartition::free(span.len())),
        ("wired".to_string(), BoundaryPartition::wired(span.len())),
    ];
    for k in 0..options.random_wirings {
        let groups = rng.gen_range(2..=4u32);
        let labels: Vec<u32> = (0..span.len()).map(|_| rng.gen_range(0..groups)).collect();
        wirings.push((
            format!("random{k}"),
            BoundaryPartition::from_labels(&labels),
        ));
    }

    let probs = params.probs(media);
    let mut cases = Vec::new();
    for (w, (name, pi)) in wirings.iter().enumerate() {
        for lower_open in [false, true] {
            let mut hits = vec![Vec::new(); bottom.len()];
            let chain_rng = substream(options.seed, 1 + w as u64, lower_open as u64);
            let mut uf = UnionFind::new(graph.num_vertices());
            run_chain(
                &graph,
                probs.clone(),
                params.q,
                pi,
                &options.schedule,
                chain_rng,
                |omega| {
                    uf.reset();
                    for (e, &open) in omega.iter().enumerate() {
                        if open {
                            let (a, b) = graph.ends(e);
                            uf.union(a, b);
                        }
                    }
                    if lower_open {
                        let first = bottom[0];
                        for v in 0..graph.num_vertices() as u32 {
                            if graph.vertex(v)[d - 1] <= 0 {
                                uf.union(first, v);
                            }
                        }
                    }
                    let mut top_roots: Vec<u32> = (0..graph.num_vertices() as u32)
                        .filter(|&v| graph.vertex(v)[d - 1] == top)
                        .map(|v| uf.find(v))
                        .collect();
                    top_roots.sort_unstable();
                    top_roots.dedup();
                    let ro = uf.find(o);
                    for (k, &x) in bottom.iter().enumerate() {
                        let rx = uf.find(x);
                        let ok = rx == ro || top_roots.binary_search(&rx).is_err();
                        hits[k].push(ok as u8 as f64);
                    }
                },
            )?;
            for (k, &x) in bottom.iter().enumerate() {
                cases.push(ProbeCase {
                    site: graph.vertex(x),
                    wiring: name.clone(),
                    lower_open,
                    estimate: Estimate::from_samples(&hits[k]),
                });
            }
        }
    }
    let minimum = cases
        .iter()
        .map(|c| c.estimate.mean)
        .fold(f64::INFINITY, f64::min);
    Ok(ProbeReport { cases, minimum })
}
