use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rng::substream;
use super::swendsen_wang::SwChain;
use crate::fk::{p_tilde, BondConfig, BoundaryPartition, DisorderLaw, FkParams, Media};
use crate::lattice::Graph;
use crate::stats::integrated_autocorrelation;
use crate::{error::invalid, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ScanOrder {
    #[default]
    Systematic,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dynamics {
    #[default]
    HeatBath,
    /// Requires an integer `q >= 2`.
    SwendsenWang,
    /// Swendsen–Wang for integer `q >= 2`, heat-bath otherwise.
    Auto,
}

impl Dynamics {
    pub fn resolve(&self, q: f64) -> Dynamics {
        let integer = q >= 2.0 && q.fract() == 0.0;
        match self {
            Dynamics::Auto if integer => Dynamics::SwendsenWang,
            Dynamics::Auto => Dynamics::HeatBath,
            d => *d,
        }
    }
}

/// Sweeps of a chain; samples are taken after sweeps `burn_in + k·thin`, `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub sweeps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub scan: ScanOrder,
    pub dynamics: Dynamics,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            sweeps: 1100,
            burn_in: 100,
            thin: 10,
            scan: ScanOrder::Systematic,
            dynamics: Dynamics::HeatBath,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps <= self.burn_in {
            return Err(invalid(
                "sweeps",
                format!(
                    "sweeps ({}) must exceed burn_in ({})",
                    self.sweeps, self.burn_in
                ),
            ));
        }
        if self.thin == 0 {
            return Err(invalid("thin", "must be at least 1"));
        }
        Ok(())
    }

    pub fn is_recorded(&self, sweep: u64) -> bool {
        sweep > self.burn_in && (sweep - self.burn_in) % self.thin == 0
    }
}

/// Heat-bath chain for `Φ^{J,π}_E`.
pub struct ChainState<'g> {
    graph: &'g Graph,
    probs: Vec<f64>,
    free_probs: Vec<f64>,
    q: f64,
    omega: BondConfig,
    rng: ChaCha8Rng,
    sweeps: u64,
    ghost_of: Vec<u32>,
    ghost_members: Vec<Vec<u32>>,
    marks: Vec<u32>,
    stamp: u32,
    queue_a: Vec<u32>,
    queue_b: Vec<u32>,
}

impl<'g> ChainState<'g> {
    pub fn new(
        graph: &'g Graph,
        media: &[f64],
        params: &FkParams,
        pi: &BoundaryPartition,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        params.validate()?;
        if media.len() != graph.num_edges() {
            return Err(invalid(
                "media",
                format!("{} values for {} edges", media.len(), graph.num_edges()),
            ));
        }
        Self::with_probs(graph, params.probs(media), params.q, pi, rng)
    }

    pub fn with_probs(
        graph: &'g Graph,
        probs: Vec<f64>,
        q: f64,
        pi: &BoundaryPartition,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        let span = graph.boundary_span();
        if span.len() != pi.len() {
            return Err(invalid(
                "boundary partition",
                format!("{} labels for a span of {}", pi.len(), span.len()),
            ));
        }
        let n = graph.num_vertices();
        let mut ghost_of = vec![NONE; n];
        let mut ghost_members = Vec::new();
        for block in pi.blocks().into_iter().filter(|b| b.len() > 1) {
            let g = (n + ghost_members.len()) as u32;
            let members: Vec<u32> = block.iter().map(|&i| span[i]).collect();
            for &v in &members {
                ghost_of[v as usize] = g;
            }
            ghost_members.push(members);
        }
        let free_probs = probs.iter().map(|&p| p_tilde(p, q)).collect();
        let total = n + ghost_members.len();
        Ok(ChainState {
            graph,
            omega: BondConfig::closed(probs.len()),
            probs,
            free_probs,
            q,
            rng,
            sweeps: 0,
            ghost_of,
            ghost_members,
            marks: vec![0; total],
            stamp: 0,
            queue_a: Vec::new(),
            queue_b: Vec::new(),
        })
    }

    pub fn config(&self) -> &BondConfig {
        &self.omega
    }

    /// Replace the current configuration; it must be compatible with the couplings.
    pub fn set_config(&mut self, omega: BondConfig) -> Result<()> {
        if omega.len() != self.probs.len() {
            return Err(invalid("omega", "wrong length"));
        }
        if omega.iter().zip(&self.probs).any(|(&o, &p)| o && p == 0.0) {
            return Err(invalid("omega", "open edge with p(J) = 0"));
        }
        self.omega = omega;
        Ok(())
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn visit(&mut self, v: u32, mine: u32, other: u32, e: u32, a_side: bool) -> bool {
        let n = self.graph.num_vertices() as u32;
        let push = |s: &mut Self, w: u32| -> bool {
            let m = s.marks[w as usize];
            if m == other {
                return true;
            }
            if m != mine {
                s.marks[w as usize] = mine;
                if a_side {
                    s.queue_a.push(w);
                } else {
                    s.queue_b.push(w);
                }
            }
            false
        };
        if v >= n {
            let g = (v - n) as usize;
            for i in 0..self.ghost_members[g].len() {
                let w = self.ghost_members[g][i];
                if push(self, w) {
                    return true;
                }
            }
            return false;
        }
        for &(w, f) in self.graph.neighbours(v) {
            if f != e && self.omega[f as usize] && push(self, w) {
                return true;
            }
        }
        let g = self.ghost_of[v as usize];
        g != NONE && push(self, g)
    }

    /// Whether the endpoints of `e` are joined by open edges other than `e`
    /// or by the boundary wiring.
    pub fn connected_off(&mut self, e: usize) -> bool {
        let (a, b) = self.graph.ends(e);
        if self.stamp >= u32::MAX - 3 {
            self.marks.iter_mut().for_each(|m| *m = 0);
            self.stamp = 0;
        }
        let sa = self.stamp + 1;
        let sb = self.stamp + 2;
        self.stamp += 2;
        self.marks[a as usize] = sa;
        self.marks[b as usize] = sb;
        self.queue_a.clear();
        self.queue_b.clear();
        self.queue_a.push(a);
        self.queue_b.push(b);
        let (mut ha, mut hb) = (0, 0);
        loop {
            let ra = self.queue_a.len() - ha;
            let rb = self.queue_b.len() - hb;
            if ra == 0 || rb == 0 {
                return false;
            }
            let found = if ra <= rb {
                let v = self.queue_a[ha];
                ha += 1;
                self.visit(v, sa, sb, e as u32, true)
            } else {
                let v = self.queue_b[hb];
                hb += 1;
                self.visit(v, sb, sa, e as u32, false)
            };
            if found {
                return true;
            }
        }
    }

    /// Conditional probability that `e` is open given the other edges.
    pub fn open_probability(&mut self, e: usize) -> f64 {
        let p = self.probs[e];
        if p == 0.0 || p == 1.0 || self.q == 1.0 {
            return p;
        }
        if self.connected_off(e) {
            p
        } else {
            self.free_probs[e]
        }
    }

    pub fn step(&mut self, e: usize) {
        let p = self.open_probability(e);
        let u: f64 = self.rng.gen();
        self.omega[e] = u < p;
    }

    pub fn sweep(&mut self, scan: ScanOrder) {
        let m = self.probs.len();
        match scan {
            ScanOrder::Systematic => (0..m).for_each(|e| self.step(e)),
            ScanOrder::Random => {
                for _ in 0..m {
                    let e = self.rng.gen_range(0..m);
                    self.step(e);
                }
            }
        }
        self.sweeps += 1;
    }
}

/// Single-edge update of a chain.
pub fn heat_bath_step(state: &mut ChainState<'_>, e: usize) {
    state.step(e);
}

/// Configurations recorded from one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub replica: u64,
    pub seed: u64,
    pub configs: Vec<BondConfig>,
    /// Integrated autocorrelation time of the open-edge fraction, in recorded samples.
    pub autocorrelation: f64,
}

/// Runs `schedule` on the given edge probabilities and passes each recorded
/// configuration to `observe`.
pub fn run_chain(
    graph: &Graph,
    probs: Vec<f64>,
    q: f64,
    pi: &BoundaryPartition,
    schedule: &Schedule,
    rng: ChaCha8Rng,
    mut observe: impl FnMut(&BondConfig),
) -> Result<()> {
    schedule.validate()?;
    match schedule.dynamics.resolve(q) {
        Dynamics::SwendsenWang => {
            let qi = q as u32;
            if q.fract() != 0.0 || qi < 2 {
                return Err(invalid(
                    "dynamics",
                    format!("Swendsen-Wang needs integer q >= 2, got {q}"),
                ));
            }
            let mut chain = SwChain::new(graph, probs, qi, pi, None, rng)?;
            for t in 1..=schedule.sweeps {
                chain.sweep();
                if schedule.is_recorded(t) {
                    observe(chain.config());
                }
            }
        }
        _ => {
            let mut chain = ChainState::with_probs(graph, probs, q, pi, rng)?;
            for t in 1..=schedule.sweeps {
                chain.sweep(schedule.scan);
                if schedule.is_recorded(t) {
                    observe(chain.config());
                }
            }
        }
    }
    Ok(())
}

fn collect_batch(
    graph: &Graph,
    probs: Vec<f64>,
    q: f64,
    pi: &BoundaryPartition,
    schedule: &Schedule,
    seed: u64,
    replica: u64,
) -> Result<SampleBatch> {
    let mut configs = Vec::new();
    run_chain(
        graph,
        probs,
        q,
        pi,
        schedule,
        substream(seed, replica, 1),
        |w| configs.push(w.clone()),
    )?;
    let m = graph.num_edges().max(1) as f64;
    let density: Vec<f64> = configs.iter().map(|c| c.count_open() as f64 / m).collect();
    Ok(SampleBatch {
        replica,
        seed,
        autocorrelation: integrated_autocorrelation(&density),
        configs,
    })
}

/// Thinned heat-bath (or Swendsen–Wang) samples from `Φ^{J,π}_E`.
pub fn sample_quenched(
    graph: &Graph,
    media: &[f64],
    params: &FkParams,
    pi: &BoundaryPartition,
    schedule: &Schedule,
    seed: u64,
) -> Result<SampleBatch> {
    params.validate()?;
    if media.len() != graph.num_edges() {
        return Err(invalid("media", "length differs from edge count"));
    }
    collect_batch(graph, params.probs(media), params.q, pi, schedule, seed, 0)
}

/// Couplings for `replica`, drawn from component 0 of its stream.
pub fn replica_media(graph: &Graph, law: &DisorderLaw, seed: u64, replica: u64) -> Media {
    let mut rng = substream(seed, replica, 0);
    Media(law.sample_media(graph.num_edges(), &mut rng))
}

/// Independent disorder replicas, each followed by a quenched chain; ordered by replica.
pub fn sample_averaged(
    graph: &Graph,
    law: &DisorderLaw,
    params: &FkParams,
    pi: &BoundaryPartition,
    replicas: u64,
    schedule: &Schedule,
    seed: u64,
) -> Result<Vec<(Media, SampleBatch)>> {
    params.validate()?;
    schedule.validate()?;
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let media = replica_media(graph, law, seed, r);
            let batch =
                collect_batch(graph, params.probs(&media), params.q, pi, schedule, seed, r)?;
            Ok((media, batch))
        })
        .collect()
}

/// Largest edge count for explicit transition matrices.
pub const MAX_KERNEL_EDGES: usize = 10;

/// Single-edge heat-bath kernels: `kernels[e][x][y]` is the probability that
/// updating `e` moves mask `x` to mask `y`.
pub fn heat_bath_kernels(
    graph: &Graph,
    probs: &[f64],
    q: f64,
    pi: &BoundaryPartition,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let m = graph.num_edges();
    if m > MAX_KERNEL_EDGES {
        return Err(crate::Error::TooLarge {
            what: "edges for an explicit kernel",
            size: m as u64,
            limit: MAX_KERNEL_EDGES as u64,
        });
    }
    let size = 1usize << m;
    let mut chain = ChainState::with_probs(graph, probs.to_vec(), q, pi, substream(0, 0, 0))?;
    let mut kernels = vec![vec![vec![0.0; size]; size]; m];
    for x in 0..size {
        chain.set_config(BondConfig::from_mask(m, x as u64))?;
        for (e, k) in kernels.iter_mut().enumerate() {
            let p = chain.open_probability(e);
            k[x][x | 1 << e] += p;
            k[x][x & !(1 << e)] += 1.0 - p;
        }
    }
    Ok(kernels)
}

/// Kernel of one systematic sweep, edges in increasing order.
pub fn sweep_kernel(kernels: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let size = kernels.first().map_or(1, |k| k.len());
    let mut acc: Vec<Vec<f64>> = (0..size)
        .map(|i| (0..size).map(|j| (i == j) as u8 as f64).collect())
        .collect();
    for k in kernels {
        acc = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| (0..size).map(|l| acc[i][l] * k[l][j]).sum())
                    .collect()
            })
            .collect();
    }
    acc
}

/// `max |π(x) K(x,y) - π(y) K(y,x)|` over all kernels and pairs.
pub fn detailed_balance_residual(kernels: &[Vec<Vec<f64>>], pi: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for k in kernels {
        for x in 0..pi.len() {
            for y in 0..pi.len() {
                worst = worst.max((pi[x] * k[x][y] - pi[y] * k[y][x]).abs());
            }
        }
    }
    worst
}

/// `max_y |Σ_x π(x) K(x,y) - π(y)|`.
pub fn stationarity_residual(kernel: &[Vec<f64>], pi: &[f64]) -> f64 {
    (0..pi.len())
        .map(|y| ((0..pi.len()).map(|x| pi[x] * kernel[x][y]).sum::<f64>() - pi[y]).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::{exact_distribution, Interaction};
    use crate::lattice::{EdgeSet, LatticeBox};

    fn square() -> Graph {
        Graph::new(&EdgeSet::free(
            &LatticeBox::from_ranges(&[(1, 2), (1, 2)]).unwrap(),
        ))
    }

    #[test]
    fn kernel_reversible() {
        let g = square();
        for pi in [BoundaryPartition::free(4), BoundaryPartition::wired(4)] {
            let probs = [0.6, 0.3, 0.8, 0.5];
            let t = crate::fk::exact_from_probs(&g, &probs, 2.5, &pi).unwrap();
            let k = heat_bath_kernels(&g, &probs, 2.5, &pi).unwrap();
            assert!(detailed_balance_residual(&k, t.probs()) < 1e-15);
            assert!(stationarity_residual(&sweep_kernel(&k), t.probs()) < 1e-14);
        }
    }

    #[test]
    fn zero_couplings_stay_closed() {
        let g = square();
        let params = FkParams::new(2.0, Interaction::Linear { slope: 0.5 }).unwrap();
        let s = Schedule {
            sweeps: 50,
            burn_in: 10,
            thin: 5,
            ..Default::default()
        };
        let b =
            sample_quenched(&g, &[0.0; 4], &params, &BoundaryPartition::free(4), &s, 3).unwrap();
        assert_eq!(b.configs.len(), 8);
        assert!(b.configs.iter().all(|c| c.count_open() == 0));
    }

    #[test]
    fn deterministic_in_seed() {
        let g = square();
        let params = FkParams::new(2.0, Interaction::Linear { slope: 0.6 }).unwrap();
        let s = Schedule::default();
        let pi = BoundaryPartition::free(4);
        let a = sample_quenched(&g, &[1.0; 4], &params, &pi, &s, 9).unwrap();
        let b = sample_quenched(&g, &[1.0; 4], &params, &pi, &s, 9).unwrap();
        let c = sample_quenched(&g, &[1.0; 4], &params, &pi, &s, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.configs, c.configs);
    }

    #[test]
    fn bad_schedule() {
        let s = Schedule {
            sweeps: 10,
            burn_in: 10,
            ..Default::default()
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn detailed_balance_on_square() {
        let g = square();
        let params = FkParams::new(2.0, Interaction::Linear { slope: 0.6 }).unwrap();
        for pi in [BoundaryPartition::free(4), BoundaryPartition::wired(4)] {
            let t = exact_distribution(&g, &[1.0; 4], &params, &pi).unwrap();
            let mut chain =
                ChainState::new(&g, &[1.0; 4], &params, &pi, substream(0, 0, 0)).unwrap();
            for mask in 0..16u64 {
                for e in 0..4 {
                    chain.set_config(BondConfig::from_mask(4, mask)).unwrap();
                    let po = chain.open_probability(e);
                    let open = mask | 1 << e;
                    let closed = mask & !(1 << e);
                    // flow closed -> open equals flow open -> closed
                    let lhs = t.prob(closed) * po;
                    let rhs = t.prob(open) * (1.0 - po);
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn wired_ghost_connects() {
        let b = LatticeBox::from_ranges(&[(1, 1)]).unwrap();
        let g = Graph::new(&EdgeSet::wired(&b));
        let params = FkParams::new(2.0, Interaction::Linear { slope: 0.5 }).unwrap();
        let mut chain = ChainState::new(
            &g,
            &[1.0, 1.0],
            &params,
            &BoundaryPartition::wired(2),
            substream(0, 0, 0),
        )
        .unwrap();
        chain.set_config(BondConfig(vec![true, false])).unwrap();
        assert!(chain.connected_off(1));
        assert!(!chain.connected_off(0));
        chain.set_config(BondConfig(vec![false, false])).unwrap();
        assert!(!chain.connected_off(0));
    }
}
