use rand::Rng;
use rayon::prelude::*;

use super::upsets::MonotoneEvent;
use crate::cluster::{crossing_report, density, UnionFind};
use crate::fk::{BondConfig, BoundaryPartition, DisorderLaw, FkParams, Wiring};
use crate::ising::{IsingChain, LabelGeometry, LabelParams};
use crate::lattice::{Covering, EdgeSet, Graph, LatticeBox, Point};
use crate::sampler::{
    replica_media, run_chain, sample_averaged, substream, PsiOptions, PsiSampler, Schedule,
};
use crate::stats::{normal_upper_quantile, z_difference, Estimate};
use crate::{error::invalid, Error, Result};

/// Stream component reserved for drawing random boundary classes.
const CLASS_COMPONENT: u64 = 1 << 19;

fn check_replicas(replicas: u64) -> Result<()> {
    if replicas == 0 {
        return Err(invalid("replicas", "need at least one replica"));
    }
    Ok(())
}

fn union_open(graph: &Graph, omega: &[bool]) -> UnionFind {
    let mut uf = UnionFind::new(graph.num_vertices());
    for (e, &open) in omega.iter().enumerate() {
        if open {
            let (a, b) = graph.ends(e);
            uf.union(a, b);
        }
    }
    uf
}

/// Whether `v` is joined to a vertex outside `bx`.
fn reaches_outside(graph: &Graph, omega: &[bool], v: u32, bx: &LatticeBox) -> bool {
    let mut seen = vec![false; graph.num_vertices()];
    let mut stack = vec![v];
    seen[v as usize] = true;
    while let Some(u) = stack.pop() {
        if !bx.contains(&graph.vertex(u)) {
            return true;
        }
        for &(w, e) in graph.neighbours(u) {
            if omega[e as usize] && !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Recorded configurations of one replica: couplings from component 0,
/// chain from component 1.
fn replica_samples(
    graph: &Graph,
    law: &DisorderLaw,
    params: &FkParams,
    pi: &BoundaryPartition,
    schedule: &Schedule,
    seed: u64,
    replica: u64,
    mut observe: impl FnMut(&BondConfig),
) -> Result<()> {
    let media = replica_media(graph, law, seed, replica);
    run_chain(
        graph,
        params.probs(&media),
        params.q,
        pi,
        schedule,
        substream(seed, replica, 1),
        |w| observe(w),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaPoint {
    pub n: i32,
    pub estimate: Estimate,
}

/// `𝔼Φ^{J,bc}_{Λ̂_N}(0 ↔ ∂Λ̂_N)` for each `N`; one value per replica, the
/// average over its recorded samples.
pub fn estimate_theta(
    d: usize,
    ns: &[i32],
    law: &DisorderLaw,
    params: &FkParams,
    wiring: Wiring,
    replicas: u64,
    schedule: &Schedule,
    seed: u64,
) -> Result<Vec<ThetaPoint>> {
    params.validate()?;
    schedule.validate()?;
    check_replicas(replicas)?;
    ns.iter()
        .map(|&n| {
            let bx = LatticeBox::lambda_hat(d, n)?;
            let graph = Graph::new(&EdgeSet::wired(&bx));
            let pi = wiring.partition(&graph);
            let origin = graph
                .vertex_id(&Point::origin(d)?)
                .expect("origin in the box");
            let values = (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let (mut hits, mut total) = (0usize, 0usize);
                    replica_samples(&graph, law, params, &pi, schedule, seed, r, |w| {
                        hits += reaches_outside(&graph, w, origin, &bx) as usize;
                        total += 1;
                    })?;
                    Ok(hits as f64 / total as f64)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(ThetaPoint {
                n,
                estimate: Estimate::from_samples(&values),
            })
        })
        .collect()
}

/// Boundary classes used by a crossing experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcPolicy {
    Free,
    Wired,
    /// Free, wired and `random` random partitions; the least favourable is reported.
    WorstOfSampled {
        random: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingResult {
    /// The smallest probability over the classes.
    pub probability: Estimate,
    pub per_class: Vec<(String, Estimate)>,
}

fn policy_classes(graph: &Graph, policy: BcPolicy, seed: u64) -> Vec<(String, BoundaryPartition)> {
    let n = graph.boundary_span().len();
    match policy {
        BcPolicy::Free => vec![("free".into(), BoundaryPartition::free(n))],
        BcPolicy::Wired => vec![("wired".into(), BoundaryPartition::wired(n))],
        BcPolicy::WorstOfSampled { random } => {
            let mut out = vec![
                ("wired".to_string(), BoundaryPartition::wired(n)),
                ("free".to_string(), BoundaryPartition::free(n)),
            ];
            let mut rng = substream(seed, 0, CLASS_COMPONENT);
            for k in 0..random {
                let blocks = rng.gen_range(2..=n.max(2)) as u32;
                let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
                out.push((
                    format!("random-{k}"),
                    BoundaryPartition::from_labels(&labels),
                ));
            }
            out
        }
    }
}

/// Probability that `E^w(Λ_N)` carries a crossing cluster which is the only
/// cluster of diameter at least `l`.
pub fn crossing_experiment(
    d: usize,
    n: i32,
    l: i32,
    law: &DisorderLaw,
    params: &FkParams,
    policy: BcPolicy,
    replicas: u64,
    schedule: &Schedule,
    seed: u64,
) -> Result<CrossingResult> {
    params.validate()?;
    schedule.validate()?;
    check_replicas(replicas)?;
    if l > n {
        return Err(invalid("l", format!("need l <= N, got l = {l}, N = {n}")));
    }
    let lambda = LatticeBox::lambda_n(d, n)?;
    let graph = Graph::new(&EdgeSet::wired(&lambda));
    let mut per_class = Vec::new();
    for (name, pi) in policy_classes(&graph, policy, seed) {
        let values = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let (mut hits, mut total) = (0usize, 0usize);
                replica_samples(&graph, law, params, &pi, schedule, seed, r, |w| {
                    hits += crossing_report(&graph, w, &lambda).unique_large(l) as usize;
                    total += 1;
                })?;
                Ok(hits as f64 / total as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        per_class.push((name, Estimate::from_samples(&values)));
    }
    let probability = per_class
        .iter()
        .map(|(_, e)| *e)
        .min_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("at least one class");
    Ok(CrossingResult {
        probability,
        per_class,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityResult {
    /// Crossing-cluster density of the last recorded sample, per replica.
    pub values: Vec<f64>,
    pub density: Estimate,
    pub outside: usize,
    pub outside_frequency: f64,
    /// Mean over blocks of the `(L,0)`-covering of the fraction of `Δ_i` joined to `∂Λ_N`.
    pub upper_blocks: Estimate,
    /// Mean over blocks of the `(L,L-1)`-covering of the fraction of `Δ_i` in
    /// clusters of diameter at least `√L`; `None` when that covering does not exist.
    pub lower_blocks: Option<Estimate>,
}

/// Crossing-cluster density in `Λ_N` against the bracket `[θᶠ - ε, θʷ + ε]`.
#[allow(clippy::too_many_arguments)]
pub fn density_experiment(
    d: usize,
    n: i32,
    l: i32,
    law: &DisorderLaw,
    params: &FkParams,
    wiring: Wiring,
    bracket: (f64, f64),
    eps: f64,
    replicas: u64,
    schedule: &Schedule,
    seed: u64,
) -> Result<DensityResult> {
    params.validate()?;
    schedule.validate()?;
    check_replicas(replicas)?;
    let lambda = LatticeBox::lambda_n(d, n)?;
    let graph = Graph::new(&EdgeSet::wired(&lambda));
    let pi = wiring.partition(&graph);
    let upper_cov = Covering::new(&lambda, l, 0)?;
    let lower_cov = Covering::new(&lambda, l, l - 1).ok();
    let min_diam = (l as f64).sqrt().ceil() as i32;
    let rows = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut last = None;
            replica_samples(&graph, law, params, &pi, schedule, seed, r, |w| {
                last = Some(w.clone())
            })?;
            let w = last.expect("schedule records at least one sample");
            let rep = crossing_report(&graph, &w, &lambda);
            let dens = rep.cluster().map_or(0.0, |c| {
                density(&graph, &rep.decomposition.clusters[c], &lambda)
            });
            let dec = &rep.decomposition;
            let mut uf = union_open(&graph, &w);
            let outside: Vec<u32> = (0..graph.num_vertices() as u32)
                .filter(|&v| !lambda.contains(&graph.vertex(v)))
                .collect();
            let mut touches = vec![false; graph.num_vertices()];
            for &v in &outside {
                let root = uf.find(v);
                touches[root as usize] = true;
            }
            let block_mean = |cov: &Covering, hit: &mut dyn FnMut(u32) -> bool| -> f64 {
                let mut total = 0.0;
                for core in &cov.cores {
                    let c = core
                        .iter()
                        .filter(|p| hit(graph.vertex_id(p).expect("core vertex")))
                        .count();
                    total += c as f64 / core.len() as f64;
                }
                total / cov.cores.len() as f64
            };
            let up = block_mean(&upper_cov, &mut |v| touches[uf.find(v) as usize]);
            let low = lower_cov.as_ref().map(|cov| {
                block_mean(cov, &mut |v| {
                    dec.clusters[dec.cluster_of[v as usize] as usize].diameter >= min_diam
                })
            });
            Ok((dens, up, low))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let outside = values
        .iter()
        .filter(|&&v| v < bracket.0 - eps || v > bracket.1 + eps)
        .count();
    let ups: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let lows: Option<Vec<f64>> = rows.iter().map(|r| r.2).collect();
    Ok(DensityResult {
        density: Estimate::from_samples(&values),
        outside,
        outside_frequency: outside as f64 / values.len() as f64,
        upper_blocks: Estimate::from_samples(&ups),
        lower_blocks: lows.map(|v| Estimate::from_samples(&v)),
        values,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlabResult {
    /// `d >= 3`: the smallest estimated connection probability over the sampled pairs.
    pub min_connectivity: Option<Estimate>,
    pub pairs: Vec<(Point, Point, Estimate)>,
    /// `d = 2`: probability of a cluster joining the two vertical faces.
    pub crossing: Option<Estimate>,
    /// Fraction of replicas with a vertex of the slab whose couplings all vanish.
    pub isolated: Estimate,
}

/// Connectivity statistics of `𝔼Φ^{J,f}_{S_{N,H}}`.
#[allow(clippy::too_many_arguments)]
pub fn slab_probe(
    d: usize,
    n: i32,
    h: i32,
    pairs: usize,
    law: &DisorderLaw,
    params: &FkParams,
    replicas: u64,
    schedule: &Schedule,
    seed: u64,
) -> Result<SlabResult> {
    params.validate()?;
    schedule.validate()?;
    check_replicas(replicas)?;
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let slab = LatticeBox::slab(d, n, h)?;
    let graph = Graph::new(&EdgeSet::wired(&slab));
    let pi = BoundaryPartition::free(graph.boundary_span().len());
    let chosen: Vec<(u32, u32)> = if d >= 3 {
        let mut rng = substream(seed, 0, CLASS_COMPONENT);
        let nv = graph.num_vertices() as u32;
        let lo = graph.vertex_id(&slab.lower()).expect("corner");
        let hi = graph.vertex_id(&slab.upper()).expect("corner");
        std::iter::once((lo, hi))
            .chain((1..pairs).map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nv))))
            .collect()
    } else {
        Vec::new()
    };
    let left: Vec<u32> = (0..graph.num_vertices() as u32)
        .filter(|&v| graph.vertex(v)[0] == 0)
        .collect();
    let right: Vec<u32> = (0..graph.num_vertices() as u32)
        .filter(|&v| graph.vertex(v)[0] == n)
        .collect();
    let rows = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let media = replica_media(&graph, law, seed, r);
            let probs = params.probs(&media);
            let isolated = slab.iter().any(|p| {
                let v = graph.vertex_id(&p).expect("slab vertex");
                graph
                    .neighbours(v)
                    .iter()
                    .all(|&(_, e)| probs[e as usize] == 0.0)
            });
            let mut pair_hits = vec![0usize; chosen.len()];
            let (mut cross, mut total) = (0usize, 0usize);
            run_chain(
                &graph,
                probs,
                params.q,
                &pi,
                schedule,
                substream(seed, r, 1),
                |w| {
                    let mut uf = union_open(&graph, w);
                    for (k, &(a, b)) in chosen.iter().enumerate() {
                        pair_hits[k] += uf.same(a, b) as usize;
                    }
                    if d == 2 {
                        let roots: std::collections::HashSet<u32> =
                            left.iter().map(|&v| uf.find(v)).collect();
                        cross += right.iter().any(|&v| roots.contains(&uf.find(v))) as usize;
                    }
                    total += 1;
                },
            )?;
            let t = total as f64;
            Ok((
                pair_hits
                    .iter()
                    .map(|&h| h as f64 / t)
                    .collect::<Vec<f64>>(),
                cross as f64 / t,
                isolated,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let pair_stats: Vec<(Point, Point, Estimate)> = chosen
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let xs: Vec<f64> = rows.iter().map(|r| r.0[k]).collect();
            (
                graph.vertex(a),
                graph.vertex(b),
                Estimate::from_samples(&xs),
            )
        })
        .collect();
    let min_connectivity = pair_stats
        .iter()
        .map(|p| p.2)
        .min_by(|a, b| a.mean.total_cmp(&b.mean));
    let crossing =
        (d == 2).then(|| Estimate::from_samples(&rows.iter().map(|r| r.1).collect::<Vec<_>>()));
    let isolated = Estimate::proportion(rows.iter().filter(|r| r.2).count(), rows.len());
    Ok(SlabResult {
        min_connectivity,
        pairs: pair_stats,
        crossing,
        isolated,
    })
}

/// `𝔼⟨σ_0⟩^+` on `Λ̂_N` for the dilute Ising model, from the Swendsen–Wang
/// spins; one value per replica, the average over its recorded sweeps.
pub fn estimate_magnetization(
    d: usize,
    n: i32,
    law: &DisorderLaw,
    beta: f64,
    replicas: u64,
    schedule: &Schedule,
    seed: u64,
) -> Result<Estimate> {
    schedule.validate()?;
    check_replicas(replicas)?;
    let bx = LatticeBox::lambda_hat(d, n)?;
    let graph = Graph::new(&EdgeSet::wired(&bx));
    let origin = graph.vertex_id(&Point::origin(d)?).expect("origin") as usize;
    let values = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let media = replica_media(&graph, law, seed, r);
            let mut chain = IsingChain::new(&graph, &media, beta, substream(seed, r, 1))?;
            let (mut sum, mut total) = (0i64, 0usize);
            for t in 1..=schedule.sweeps {
                chain.sweep();
                if schedule.is_recorded(t) {
                    sum += chain.spins().0[origin] as i64;
                    total += 1;
                }
            }
            Ok(sum as f64 / total as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&values))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelRunResult {
    pub samples: usize,
    pub plus: usize,
    pub zero: usize,
    pub minus: usize,
    /// Magnetisation of `Λ_N` per replica, averaged over recorded sweeps.
    pub magnetization: Estimate,
    /// Invariant failures, as `(replica, sweep, message)`.
    pub violations: Vec<(u64, u64, String)>,
}

/// Phase labels of every recorded `(σ, ω)` of the dilute Ising model on
/// `E^w(Λ_N)` with plus boundary condition, each checked for the
/// magnetisation bracket, the sign rule and locality.
pub fn phase_label_experiment(
    d: usize,
    n: i32,
    l: i32,
    law: &DisorderLaw,
    beta: f64,
    label: &LabelParams,
    replicas: u64,
    schedule: &Schedule,
    seed: u64,
) -> Result<LabelRunResult> {
    schedule.validate()?;
    check_replicas(replicas)?;
    let geom = LabelGeometry::new(d, n, l)?;
    let graph = &geom.graph;
    let inside: Vec<usize> = (0..graph.num_vertices())
        .filter(|&v| geom.lambda.contains(&graph.vertex(v as u32)))
        .collect();
    let rows = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let media = replica_media(graph, law, seed, r);
            let mut chain = IsingChain::new(graph, &media, beta, substream(seed, r, 1))?;
            let mut mask_rng = substream(seed, r, 2);
            let mut counts = [0usize; 3];
            let mut mags = Vec::new();
            let mut bad = Vec::new();
            for t in 1..=schedule.sweeps {
                chain.sweep();
                if !schedule.is_recorded(t) {
                    continue;
                }
                let spins = chain.spins();
                let omega = &chain.bonds().0;
                let labels = geom.labels(&spins, omega, label);
                for &p in &labels.phi {
                    counts[(p + 1) as usize] += 1;
                }
                let m: i64 = inside.iter().map(|&v| spins.0[v] as i64).sum();
                mags.push(m as f64 / inside.len() as f64);
                if let Err(e) = geom.check_invariants(&spins, omega, &labels, &mut mask_rng) {
                    bad.push((r, t, e.to_string()));
                }
            }
            let mag = mags.iter().sum::<f64>() / mags.len() as f64;
            Ok((counts, mags.len(), mag, bad))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = LabelRunResult {
        samples: 0,
        plus: 0,
        zero: 0,
        minus: 0,
        magnetization: Estimate::from_samples(&rows.iter().map(|r| r.2).collect::<Vec<_>>()),
        violations: Vec::new(),
    };
    for (counts, samples, _, bad) in rows {
        out.minus += counts[0];
        out.zero += counts[1];
        out.plus += counts[2];
        out.samples += samples;
        out.violations.extend(bad);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationOutcome {
    pub event: String,
    pub a: Estimate,
    pub b: Estimate,
    pub z: f64,
    pub rejected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationReport {
    pub alpha: f64,
    /// Bonferroni-corrected critical value of `z`.
    pub critical: f64,
    pub outcomes: Vec<DominationOutcome>,
}

impl DominationReport {
    pub fn rejections(&self) -> usize {
        self.outcomes.iter().filter(|o| o.rejected).count()
    }
}

/// Batches used for the standard errors of a domination test.
pub const DOMINATION_BATCHES: usize = 50;

/// One-sided tests of `P_A(E) <= P_B(E)` for each increasing event, with a
/// Bonferroni correction over the events.
pub fn domination_test(
    a: &[BondConfig],
    b: &[BondConfig],
    events: &[MonotoneEvent],
    alpha: f64,
) -> Result<DominationReport> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("samples", "both samples must be nonempty"));
    }
    let m = a[0].len();
    if a.iter().chain(b).any(|w| w.len() != m) {
        return Err(invalid("samples", "samples live on different edge sets"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", "must lie in (0, 1)"));
    }
    if let Some(e) = events.iter().find(|e| !e.is_increasing()) {
        return Err(invalid(
            "events",
            format!("event '{}' is not marked increasing", e.name),
        ));
    }
    let critical = normal_upper_quantile(alpha / events.len().max(1) as f64);
    let outcomes = events
        .iter()
        .map(|ev| {
            let xs: Vec<f64> = a.iter().map(|w| ev.holds(w) as u8 as f64).collect();
            let ys: Vec<f64> = b.iter().map(|w| ev.holds(w) as u8 as f64).collect();
            let ea = Estimate::batch_means(&xs, DOMINATION_BATCHES);
            let eb = Estimate::batch_means(&ys, DOMINATION_BATCHES);
            let z = z_difference(&ea, &eb);
            DominationOutcome {
                event: ev.name.clone(),
                a: ea,
                b: eb,
                z,
                rejected: z > critical,
            }
        })
        .collect();
    Ok(DominationReport {
        alpha,
        critical,
        outcomes,
    })
}

/// Twenty increasing events on `E^w(Λ)` mixing single edges, lateral edges
/// between blocks, crossings, connections and counts.
pub fn standard_events(graph: &Graph, lambda: &LatticeBox, lateral: &[u32]) -> Vec<MonotoneEvent> {
    let d = lambda.dim();
    let ends: std::sync::Arc<Vec<(u32, u32)>> = std::sync::Arc::new(graph.all_ends().to_vec());
    let nv = graph.num_vertices();
    let m = graph.num_edges() as u32;
    let center = {
        let c: Vec<i32> = (0..d)
            .map(|k| (lambda.lower()[k] + lambda.upper()[k]) / 2)
            .collect();
        graph
            .vertex_id(&Point::new(&c).expect("dimension"))
            .expect("center")
    };
    let set_where = |f: &dyn Fn(&Point) -> bool| -> Vec<u32> {
        (0..nv as u32).filter(|&v| f(&graph.vertex(v))).collect()
    };
    let low_face = set_where(&|p| p[0] < lambda.lower()[0]);
    let high_face = set_where(&|p| p[0] > lambda.upper()[0]);
    let bottom = set_where(&|p| p[d - 1] < lambda.lower()[d - 1]);
    let top = set_where(&|p| p[d - 1] > lambda.upper()[d - 1]);
    let outside = set_where(&|p| !lambda.contains(p));
    let corner = vec![graph.vertex_id(&lambda.lower()).expect("corner")];
    let connects = {
        let ends = ends.clone();
        move |w: &[bool], a: &[u32], b: &[u32]| -> bool {
            let mut uf = UnionFind::new(nv);
            for (e, &(x, y)) in ends.iter().enumerate() {
                if w[e] {
                    uf.union(x, y);
                }
            }
            let roots: std::collections::HashSet<u32> = a.iter().map(|&v| uf.find(v)).collect();
            b.iter().any(|&v| roots.contains(&uf.find(v)))
        }
    };
    let mut events = Vec::new();
    let pick =
        |k: usize, of: &[u32]| -> u32 { of.get(k * of.len() / 4).copied().unwrap_or(k as u32 % m) };
    for k in 0..4 {
        let e = pick(k, lateral);
        events.push(MonotoneEvent::up_set(
            format!("lateral edge {e} open"),
            vec![vec![e]],
        ));
    }
    let central: Vec<u32> = graph.neighbours(center).iter().map(|&(_, e)| e).collect();
    for (k, &e) in central.iter().take(2).enumerate() {
        events.push(MonotoneEvent::up_set(
            format!("central edge {k} open"),
            vec![vec![e]],
        ));
    }
    events.push(MonotoneEvent::up_set("edge 0 open", vec![vec![0]]));
    events.push(MonotoneEvent::up_set(
        format!("edge {} open", m - 1),
        vec![vec![m - 1]],
    ));
    events.push(MonotoneEvent::up_set(
        "two lateral edges open",
        vec![vec![pick(0, lateral), pick(2, lateral)]],
    ));
    events.push(MonotoneEvent::up_set(
        "some lateral edge open",
        lateral.iter().take(8).map(|&e| vec![e]).collect(),
    ));
    events.push(MonotoneEvent::up_set(
        "all central edges open",
        vec![central.clone()],
    ));
    let c = connects.clone();
    let (lo, hi) = (low_face.clone(), high_face.clone());
    events.push(MonotoneEvent::increasing("left-right crossing", move |w| {
        c(w, &lo, &hi)
    }));
    let c = connects.clone();
    let (bo, to) = (bottom.clone(), top.clone());
    events.push(MonotoneEvent::increasing("bottom-top crossing", move |w| {
        c(w, &bo, &to)
    }));
    let c = connects.clone();
    let out = outside.clone();
    events.push(MonotoneEvent::increasing(
        "center joined to the boundary",
        move |w| c(w, &[center], &out),
    ));
    let c = connects.clone();
    let cr = corner.clone();
    events.push(MonotoneEvent::increasing(
        "center joined to the corner",
        move |w| c(w, &[center], &cr),
    ));
    for frac in [4u32, 2] {
        let k = m / frac;
        events.push(MonotoneEvent::increasing(
            format!("at least {k} open edges"),
            move |w| w.iter().filter(|&&x| x).count() as u32 >= k,
        ));
    }
    let lat: Vec<u32> = lateral.to_vec();
    let k = (lat.len() / 3) as u32;
    events.push(MonotoneEvent::increasing(
        format!("at least {k} open lateral edges"),
        move |w| lat.iter().filter(|&&e| w[e as usize]).count() as u32 >= k,
    ));
    let e2 = ends.clone();
    events.push(MonotoneEvent::increasing(
        "center cluster has 10 vertices",
        move |w| {
            let mut uf = UnionFind::new(nv);
            for (e, &(x, y)) in e2.iter().enumerate() {
                if w[e] {
                    uf.union(x, y);
                }
            }
            uf.set_size(center) >= 10
        },
    ));
    let c = connects;
    events.push(MonotoneEvent::increasing(
        "corner joined to the left boundary",
        move |w| c(w, &corner, &low_face),
    ));
    events
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiDominationResult {
    /// Tests of `Ψ ≤ 𝔼Φᶠ`.
    pub forward: DominationReport,
    /// The same samples in the reverse order, which should be rejected.
    pub swapped: DominationReport,
}

/// Compares `Ψ^L_Λ` with `𝔼Φ^{J,f}_{E^w(Λ)}` on the box `{1, …, 2L-1}^d`,
/// one independent draw per replica from each.
#[allow(clippy::too_many_arguments)]
pub fn psi_domination(
    d: usize,
    l: i32,
    law: &DisorderLaw,
    params: &FkParams,
    replicas: u64,
    schedule: &Schedule,
    psi: PsiOptions,
    alpha: f64,
    seed: u64,
) -> Result<PsiDominationResult> {
    check_replicas(replicas)?;
    let lambda = LatticeBox::admissible(l, &vec![2; d])?;
    let sampler = PsiSampler::new(&lambda, l, law, params, psi)?;
    let graph = Graph::new(&EdgeSet::wired(&lambda));
    let psi_draws = (0..replicas)
        .into_par_iter()
        .map(|r| sampler.sample(seed, r).map(|s| s.1))
        .collect::<Result<Vec<_>>>()?;
    let free = BoundaryPartition::free(graph.boundary_span().len());
    let other = seed ^ 0x9e37_79b9_7f4a_7c15;
    let phi_draws: Vec<BondConfig> =
        sample_averaged(&graph, law, params, &free, replicas, schedule, other)?
            .into_iter()
            .map(|(_, mut batch)| batch.configs.pop().expect("a recorded sample"))
            .collect();
    let events = standard_events(&graph, &lambda, &sampler.partition().lateral);
    Ok(PsiDominationResult {
        forward: domination_test(&psi_draws, &phi_draws, &events, alpha)?,
        swapped: domination_test(&phi_draws, &psi_draws, &events, alpha)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::Interaction;

    fn quick() -> Schedule {
        Schedule {
            sweeps: 3,
            burn_in: 1,
            thin: 1,
            ..Default::default()
        }
    }

    #[test]
    fn theta_vanishes_without_bonds() {
        let law = DisorderLaw::dirac(1.0).unwrap();
        let params = FkParams::new(2.0, Interaction::Ising { beta: 0.0 }).unwrap();
        for w in [Wiring::Free, Wiring::Wired] {
            let t = estimate_theta(2, &[1, 3], &law, &params, w, 4, &quick(), 1).unwrap();
            assert!(t.iter().all(|p| p.estimate.mean == 0.0));
        }
    }

    #[test]
    fn full_bonds_cross() {
        let law = DisorderLaw::dirac(1.0).unwrap();
        let params = FkParams::new(1.0, Interaction::Linear { slope: 1.0 }).unwrap();
        let r = crossing_experiment(
            2,
            8,
            2,
            &law,
            &params,
            BcPolicy::WorstOfSampled { random: 2 },
            3,
            &quick(),
            5,
        )
        .unwrap();
        assert_eq!(r.per_class.len(), 4);
        assert_eq!(r.probability.mean, 1.0);
        let dens = density_experiment(
            2,
            8,
            2,
            &law,
            &params,
            Wiring::Free,
            (1.0, 1.0),
            0.0,
            3,
            &quick(),
            5,
        )
        .unwrap();
        assert!(dens.values.iter().all(|&v| v == 1.0));
        assert_eq!(dens.outside, 0);
        assert_eq!(dens.upper_blocks.mean, 1.0);
    }

    #[test]
    fn slab_without_bonds() {
        let law = DisorderLaw::bernoulli(0.5).unwrap();
        let params = FkParams::new(1.0, Interaction::Linear { slope: 0.0 }).unwrap();
        let r = slab_probe(3, 5, 3, 4, &law, &params, 3, &quick(), 2).unwrap();
        assert_eq!(r.min_connectivity.unwrap().mean, 0.0);
        assert_eq!(r.isolated.mean, 1.0);
        let r2 = slab_probe(2, 5, 3, 0, &law, &params, 3, &quick(), 2).unwrap();
        assert_eq!(r2.crossing.unwrap().mean, 0.0);
    }

    #[test]
    fn domination_refuses_unchecked_events() {
        let a = vec![BondConfig::closed(2)];
        let ev = vec![MonotoneEvent::unchecked("closed", |w| !w[0])];
        assert!(domination_test(&a, &a, &ev, 0.01).is_err());
    }

    #[test]
    fn identical_samples_never_rejected() {
        let mut rng = substream(3, 0, 0);
        let a: Vec<BondConfig> = (0..500)
            .map(|_| BondConfig((0..4).map(|_| rng.gen()).collect()))
            .collect();
        let ev: Vec<MonotoneEvent> = (0..4)
            .map(|e| MonotoneEvent::up_set(format!("{e}"), vec![vec![e]]))
            .collect();
        assert_eq!(domination_test(&a, &a, &ev, 0.01).unwrap().rejections(), 0);
    }

    #[test]
    fn twenty_standard_events() {
        let lambda = LatticeBox::admissible(3, &[2, 2]).unwrap();
        let g = Graph::new(&EdgeSet::wired(&lambda));
        let part = crate::lattice::block_partition(&lambda, 3).unwrap();
        let ev = standard_events(&g, &lambda, &part.lateral);
        assert_eq!(ev.len(), 20);
        let open = vec![true; g.num_edges()];
        assert!(ev.iter().all(|e| e.holds(&open)));
        let closed = vec![false; g.num_edges()];
        assert!(ev.iter().all(|e| !e.holds(&closed)));
    }
}
