//! The experiments behind each subcommand.

use std::fmt;
use std::str::FromStr;

use fk_core::cluster::oracle::audit_pivotal;
use fk_core::fk::{
    exact_distribution, exact_from_probs, for_each_media, BoundaryPartition, DisorderLaw, FkParams,
    Interaction, Wiring, MAX_ENUMERATED_EDGES,
};
use fk_core::ising::{legendre_lambda_star, IsingSystem, LabelParams};
use fk_core::lattice::{Covering, Edge, EdgeSet, Graph, LatticeBox, Point, MAX_DIM};
use fk_core::sampler::{
    detailed_balance_residual, heat_bath_kernels, sample_averaged, stationarity_residual,
    substream, sweep_kernel, ChainState, Dynamics, PsiOptions, ScanOrder, Schedule,
};
use fk_core::stats::{z_difference, Estimate};
use fk_core::verify::{
    averaged_conditional, crossing_experiment, density_experiment, dlr_conditional_formula,
    dlr_margin, estimate_magnetization, estimate_theta, lss_threshold, phase_label_experiment,
    psi_domination, r_lss, r_prime, slab_probe, verify_corpus, BcPolicy, CorpusOptions,
    VerifyOptions,
};
use rand::Rng;

use crate::config::{config_error, ConfigError, ExperimentConfig};
use crate::records::{Outcome, ResultRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Enumerate,
    Verify,
    DlrFailure,
    Crossing,
    Density,
    Theta,
    Slab,
    PsiDomination,
    PhaseLabels,
    CoveringCheck,
    PivotalAudit,
    SamplerCheck,
    EsCheck,
    Constants,
}

const MODEL: &[&str] = &[
    "model.q",
    "model.interaction",
    "model.beta",
    "model.slope",
    "model.disorder",
];
const SCHEDULE: &[&str] = &[
    "schedule.replicas",
    "schedule.sweeps",
    "schedule.burn_in",
    "schedule.thin",
    "schedule.dynamics",
    "schedule.scan",
];

impl Experiment {
    pub const ALL: [Experiment; 14] = [
        Experiment::Enumerate,
        Experiment::Verify,
        Experiment::DlrFailure,
        Experiment::Crossing,
        Experiment::Density,
        Experiment::Theta,
        Experiment::Slab,
        Experiment::PsiDomination,
        Experiment::PhaseLabels,
        Experiment::CoveringCheck,
        Experiment::PivotalAudit,
        Experiment::SamplerCheck,
        Experiment::EsCheck,
        Experiment::Constants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Enumerate => "enumerate",
            Experiment::Verify => "verify",
            Experiment::DlrFailure => "dlr-failure",
            Experiment::Crossing => "crossing",
            Experiment::Density => "density",
            Experiment::Theta => "theta",
            Experiment::Slab => "slab",
            Experiment::PsiDomination => "psi-domination",
            Experiment::PhaseLabels => "phase-labels",
            Experiment::CoveringCheck => "covering-check",
            Experiment::PivotalAudit => "pivotal-audit",
            Experiment::SamplerCheck => "sampler-check",
            Experiment::EsCheck => "es-check",
            Experiment::Constants => "constants",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Experiment::Enumerate => "exact edge marginals of a small box, free and wired",
            Experiment::Verify => "exhaustive inequality checks over small bond animals",
            Experiment::DlrFailure => "averaged conditional law of the three-vertex counterexample",
            Experiment::Crossing => "probability of a unique large crossing cluster",
            Experiment::Density => "crossing-cluster density against the theta bracket",
            Experiment::Theta => "finite-volume theta estimates",
            Experiment::Slab => "connectivity in a slab under free boundary conditions",
            Experiment::PsiDomination => "block product measure against the averaged free measure",
            Experiment::PhaseLabels => "phase labels of dilute Ising samples and their invariants",
            Experiment::CoveringCheck => "brute-force audit of the (L, L')-coverings",
            Experiment::PivotalAudit => "double connections and pivotal bonds against flow oracles",
            Experiment::SamplerCheck => "heat-bath frequencies and kernels on the unit square",
            Experiment::EsCheck => "Edwards-Sokal marginals and the Swendsen-Wang kernel",
            Experiment::Constants => "renormalisation constants and the Legendre transform",
        }
    }

    /// Configuration keys the experiment reads.
    pub fn keys(self) -> Vec<&'static str> {
        let mut k: Vec<&'static str> = match self {
            Experiment::Enumerate => {
                let mut k = vec![
                    "enumerate.sides",
                    "enumerate.edges",
                    "enumerate.coupling",
                    "enumerate.average",
                ];
                k.extend(MODEL);
                k
            }
            Experiment::Verify => vec![
                "verify.max_edges",
                "verify.exhaustive_edges",
                "verify.tolerance",
                "verify.p_grid",
                "verify.q_grid",
            ],
            Experiment::DlrFailure => vec!["dlr.lambda", "dlr.p", "model.q"],
            Experiment::Crossing => {
                let mut k = vec![
                    "lattice.d",
                    "lattice.n",
                    "crossing.l",
                    "crossing.policy",
                    "crossing.random_classes",
                ];
                k.extend(MODEL);
                k.extend(SCHEDULE);
                k
            }
            Experiment::Density => {
                let mut k = vec![
                    "lattice.d",
                    "lattice.n",
                    "lattice.l",
                    "density.eps",
                    "density.theta_n",
                    "density.wiring",
                ];
                k.extend(MODEL);
                k.extend(SCHEDULE);
                k
            }
            Experiment::Theta => {
                let mut k = vec!["lattice.d", "theta.ns", "theta.wiring"];
                k.extend(MODEL);
                k.extend(SCHEDULE);
                k
            }
            Experiment::Slab => {
                let mut k = vec!["lattice.d", "lattice.n", "slab.h", "slab.pairs"];
                k.extend(MODEL);
                k.extend(SCHEDULE);
                k
            }
            Experiment::PsiDomination => {
                let mut k = vec![
                    "lattice.d",
                    "lattice.l",
                    "psi.alpha",
                    "psi.exact_limit",
                    "psi.block_sweeps",
                ];
                k.extend(MODEL);
                k.extend(SCHEDULE);
                k
            }
            Experiment::PhaseLabels => {
                let mut k = vec![
                    "lattice.d",
                    "lattice.n",
                    "lattice.l",
                    "model.beta",
                    "model.disorder",
                    "labels.delta",
                    "labels.delta_prime",
                    "labels.m_beta",
                    "labels.theta_n",
                ];
                k.extend(SCHEDULE);
                k
            }
            Experiment::CoveringCheck => vec!["covering.max_side", "covering.dims"],
            Experiment::PivotalAudit => vec!["pivotal.side", "pivotal.configs", "pivotal.p"],
            Experiment::SamplerCheck => vec![
                "sampler.p",
                "sampler.sweeps",
                "sampler.batches",
                "model.q",
                "schedule.burn_in",
                "schedule.scan",
            ],
            Experiment::EsCheck => vec!["es.sides", "es.coupling", "model.beta"],
            Experiment::Constants => vec!["constants.k_max", "constants.grid"],
        };
        k.sort_unstable();
        k
    }

    /// Whether `key` matters for this configuration; the unused half of the
    /// coupling map is dropped.
    pub fn uses(self, key: &str, interaction: &str) -> bool {
        if !self.keys().contains(&key) {
            return false;
        }
        let uses_interaction = self.keys().contains(&"model.interaction");
        match key {
            "model.slope" if uses_interaction => interaction == "linear",
            "model.beta" if uses_interaction => interaction != "linear",
            _ => true,
        }
    }

    pub fn validate(self, cfg: &ExperimentConfig) -> Result<(), ConfigError> {
        let keys = self.keys();
        let has = |k: &str| keys.contains(&k);
        if has("lattice.d") {
            let d = cfg.unsigned("lattice.d");
            if !(1..=MAX_DIM as u64).contains(&d) {
                return Err(config_error(
                    "lattice.d",
                    format!("must lie in 1..={MAX_DIM}"),
                ));
            }
        }
        for key in ["lattice.n", "lattice.l"] {
            if has(key) && cfg.int(key) < 1 {
                return Err(config_error(key, "must be at least 1"));
            }
        }
        if has("model.q") {
            params(cfg)?;
        }
        if has("schedule.replicas") {
            let s = schedule(cfg)?;
            if cfg.unsigned("schedule.replicas") == 0 {
                return Err(config_error("schedule.replicas", "must be at least 1"));
            }
            if s.dynamics == Dynamics::SwendsenWang && has("model.q") {
                let q = cfg.real("model.q");
                if !(q >= 2.0 && q.fract() == 0.0) {
                    return Err(config_error(
                        "schedule.dynamics",
                        "swendsen-wang needs an integer q >= 2",
                    ));
                }
            }
        }
        if has("model.beta") && !(cfg.real("model.beta") >= 0.0) {
            return Err(config_error("model.beta", "must be >= 0"));
        }
        match self {
            Experiment::Enumerate => {
                let g = enumerate_graph(cfg)?;
                if g.num_edges() > MAX_ENUMERATED_EDGES {
                    return Err(config_error(
                        "enumerate.sides",
                        format!(
                            "{} edges exceed the enumeration limit {MAX_ENUMERATED_EDGES}",
                            g.num_edges()
                        ),
                    ));
                }
                if cfg.flag("enumerate.average")
                    && cfg
                        .disorder()
                        .law()
                        .map_or(true, |l| l.atom_list().is_none())
                {
                    return Err(config_error(
                        "model.disorder",
                        "averaging needs a law with finitely many atoms",
                    ));
                }
                if !(cfg.real("enumerate.coupling") >= 0.0) {
                    return Err(config_error("enumerate.coupling", "must be >= 0"));
                }
            }
            Experiment::Verify => {
                let m = cfg.unsigned("verify.max_edges");
                if !(1..=5).contains(&m) {
                    return Err(config_error("verify.max_edges", "must lie in 1..=5"));
                }
                if cfg.unsigned("verify.exhaustive_edges") > 5 {
                    return Err(config_error("verify.exhaustive_edges", "must be at most 5"));
                }
                if !(cfg.real("verify.tolerance") >= 0.0) {
                    return Err(config_error("verify.tolerance", "must be >= 0"));
                }
                if cfg
                    .reals("verify.p_grid")
                    .iter()
                    .any(|&p| !(p > 0.0 && p < 1.0))
                {
                    return Err(config_error("verify.p_grid", "values must lie in (0, 1)"));
                }
                if cfg.reals("verify.q_grid").iter().any(|&q| !(q >= 1.0)) {
                    return Err(config_error("verify.q_grid", "values must be >= 1"));
                }
            }
            Experiment::DlrFailure => {
                for key in ["dlr.lambda", "dlr.p"] {
                    let v = cfg.real(key);
                    if !(v > 0.0 && v < 1.0) {
                        return Err(config_error(key, "must lie in (0, 1)"));
                    }
                }
            }
            Experiment::Crossing => {
                let l = crossing_scale(cfg);
                if l < 1 || l > cfg.int("lattice.n") {
                    return Err(config_error(
                        "crossing.l",
                        "need 1 <= l <= N (0 selects N/4)",
                    ));
                }
            }
            Experiment::Density => {
                let (n, l) = (cfg.int("lattice.n"), cfg.int("lattice.l"));
                if l > n - 1 {
                    return Err(config_error(
                        "lattice.l",
                        format!("need L <= N - 1 = {}", n - 1),
                    ));
                }
                if cfg.int("density.theta_n") < 1 {
                    return Err(config_error("density.theta_n", "must be at least 1"));
                }
                if !(cfg.real("density.eps") >= 0.0) {
                    return Err(config_error("density.eps", "must be >= 0"));
                }
            }
            Experiment::Theta => {
                if cfg
                    .ints("theta.ns")
                    .iter()
                    .any(|&n| n < 1 || n > i32::MAX as i64)
                {
                    return Err(config_error("theta.ns", "values must be positive"));
                }
            }
            Experiment::Slab => {
                if cfg.int("lattice.n") < 2 {
                    return Err(config_error("lattice.n", "a slab needs N >= 2"));
                }
                if cfg.int("slab.h") < 2 {
                    return Err(config_error("slab.h", "a slab needs H >= 2"));
                }
            }
            Experiment::PsiDomination => {
                let a = cfg.real("psi.alpha");
                if !(a > 0.0 && a < 1.0) {
                    return Err(config_error("psi.alpha", "must lie in (0, 1)"));
                }
                if cfg.unsigned("psi.block_sweeps") == 0 {
                    return Err(config_error("psi.block_sweeps", "must be at least 1"));
                }
            }
            Experiment::PhaseLabels => {
                let (n, l) = (cfg.int("lattice.n"), cfg.int("lattice.l"));
                if 3 * l > n - 1 {
                    return Err(config_error(
                        "lattice.l",
                        format!("the (L, L)-covering of Λ_N needs 3L <= N - 1 = {}", n - 1),
                    ));
                }
                for key in ["labels.delta", "labels.delta_prime"] {
                    if !(cfg.real(key) >= 0.0) {
                        return Err(config_error(key, "must be >= 0"));
                    }
                }
                if let Some(m) = cfg.real_or_auto("labels.m_beta") {
                    if !(0.0..=1.0).contains(&m) {
                        return Err(config_error(
                            "labels.m_beta",
                            "must lie in [0, 1] or be auto",
                        ));
                    }
                }
                if cfg.int("labels.theta_n") < 1 {
                    return Err(config_error("labels.theta_n", "must be at least 1"));
                }
            }
            Experiment::CoveringCheck => {
                if !(1..=40).contains(&cfg.int("covering.max_side")) {
                    return Err(config_error("covering.max_side", "must lie in 1..=40"));
                }
                if cfg
                    .ints("covering.dims")
                    .iter()
                    .any(|&d| !(1..=MAX_DIM as i64).contains(&d))
                {
                    return Err(config_error(
                        "covering.dims",
                        format!("dimensions must lie in 1..={MAX_DIM}"),
                    ));
                }
            }
            Experiment::PivotalAudit => {
                if !(2..=64).contains(&cfg.int("pivotal.side")) {
                    return Err(config_error("pivotal.side", "must lie in 2..=64"));
                }
                if !(0.0..=1.0).contains(&cfg.real("pivotal.p")) {
                    return Err(config_error("pivotal.p", "must lie in [0, 1]"));
                }
            }
            Experiment::SamplerCheck => {
                let p = cfg.real("sampler.p");
                if !(p > 0.0 && p < 1.0) {
                    return Err(config_error("sampler.p", "must lie in (0, 1)"));
                }
                let b = cfg.unsigned("sampler.batches");
                if b < 2 || cfg.unsigned("sampler.sweeps") < b {
                    return Err(config_error(
                        "sampler.batches",
                        "need 2 <= batches <= sweeps",
                    ));
                }
            }
            Experiment::EsCheck => {
                if !(cfg.real("es.coupling") >= 0.0) {
                    return Err(config_error("es.coupling", "must be >= 0"));
                }
                es_system(cfg)?
                    .es_joint_exact()
                    .map_err(|e| config_error("es.sides", e.to_string()))?;
            }
            Experiment::Constants => {
                if !(2..=64).contains(&cfg.unsigned("constants.k_max")) {
                    return Err(config_error("constants.k_max", "must lie in 2..=64"));
                }
                if cfg.unsigned("constants.grid") < 2 {
                    return Err(config_error("constants.grid", "must be at least 2"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Failure of a run before any result exists.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] fk_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Precondition failures surface as configuration errors.
    pub fn is_config(&self) -> bool {
        use fk_core::Error as E;
        match self {
            RunError::Config(_) => true,
            RunError::Core(e) => !matches!(e, E::Invariant(_) | E::SaturatedEdge(_)),
            RunError::Io(_) => false,
        }
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, RunError::Core(fk_core::Error::Invariant(_)))
    }
}

pub fn params(cfg: &ExperimentConfig) -> Result<FkParams, ConfigError> {
    let interaction = match cfg.raw("model.interaction") {
        "linear" => Interaction::Linear {
            slope: cfg.real("model.slope"),
        },
        "potts" => Interaction::Potts {
            beta: cfg.real("model.beta"),
        },
        _ => Interaction::Ising {
            beta: cfg.real("model.beta"),
        },
    };
    let field = match interaction {
        Interaction::Linear { .. } => "model.slope",
        _ => "model.beta",
    };
    if !(cfg.real("model.q") >= 1.0) {
        return Err(config_error("model.q", "need q >= 1"));
    }
    FkParams::new(cfg.real("model.q"), interaction).map_err(|e| config_error(field, e.to_string()))
}

pub fn law(cfg: &ExperimentConfig) -> Result<DisorderLaw, ConfigError> {
    cfg.disorder()
        .law()
        .map_err(|e| config_error("model.disorder", e.to_string()))
}

pub fn schedule(cfg: &ExperimentConfig) -> Result<Schedule, ConfigError> {
    let s = Schedule {
        sweeps: cfg.unsigned("schedule.sweeps"),
        burn_in: cfg.unsigned("schedule.burn_in"),
        thin: cfg.unsigned("schedule.thin"),
        scan: match cfg.raw("schedule.scan") {
            "random" => ScanOrder::Random,
            _ => ScanOrder::Systematic,
        },
        dynamics: match cfg.raw("schedule.dynamics") {
            "heat-bath" => Dynamics::HeatBath,
            "swendsen-wang" => Dynamics::SwendsenWang,
            _ => Dynamics::Auto,
        },
    };
    if s.sweeps <= s.burn_in {
        return Err(config_error(
            "schedule.sweeps",
            "must exceed schedule.burn_in",
        ));
    }
    if s.thin == 0 {
        return Err(config_error("schedule.thin", "must be at least 1"));
    }
    Ok(s)
}

fn dim(cfg: &ExperimentConfig) -> usize {
    cfg.unsigned("lattice.d") as usize
}

fn replicas(cfg: &ExperimentConfig) -> u64 {
    cfg.unsigned("schedule.replicas")
}

fn crossing_scale(cfg: &ExperimentConfig) -> i64 {
    match cfg.int("crossing.l") {
        0 => cfg.int("lattice.n") / 4,
        l => l,
    }
}

fn sides_box(cfg: &ExperimentConfig, key: &str) -> Result<LatticeBox, ConfigError> {
    let sides = cfg.ints(key);
    if sides.is_empty() || sides.len() > MAX_DIM {
        return Err(config_error(
            key,
            format!("need between 1 and {MAX_DIM} sides"),
        ));
    }
    if sides.iter().any(|&s| !(1..=64).contains(&s)) {
        return Err(config_error(key, "sides must lie in 1..=64"));
    }
    let ranges: Vec<(i32, i32)> = sides.iter().map(|&s| (1, s as i32)).collect();
    LatticeBox::from_ranges(&ranges).map_err(|e| config_error(key, e.to_string()))
}

fn enumerate_graph(cfg: &ExperimentConfig) -> Result<Graph, ConfigError> {
    let bx = sides_box(cfg, "enumerate.sides")?;
    let edges = match cfg.raw("enumerate.edges") {
        "wired" => EdgeSet::wired(&bx),
        _ => EdgeSet::free(&bx),
    };
    if edges.is_empty() {
        return Err(config_error("enumerate.sides", "the box has no edges"));
    }
    Ok(Graph::new(&edges))
}

fn es_system(cfg: &ExperimentConfig) -> Result<IsingSystem, ConfigError> {
    let bx = sides_box(cfg, "es.sides")?;
    let m = EdgeSet::wired(&bx).len();
    IsingSystem::new(
        &bx,
        &vec![cfg.real("es.coupling"); m],
        cfg.real("model.beta"),
    )
    .map_err(|e| config_error("es.sides", e.to_string()))
}

fn slug(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect();
    while s.contains("--") {
        s = s.replace("--", "-");
    }
    s.trim_matches('-').to_string()
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Runs `cfg`; statistical outcomes are records, literal invariant failures are violations.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let mut out = Outcome::default();
    match cfg.experiment {
        Experiment::Enumerate => enumerate(cfg, &mut out)?,
        Experiment::Verify => verify(cfg, &mut out)?,
        Experiment::DlrFailure => dlr(cfg, &mut out)?,
        Experiment::Crossing => crossing(cfg, &mut out)?,
        Experiment::Density => density(cfg, &mut out)?,
        Experiment::Theta => theta(cfg, &mut out)?,
        Experiment::Slab => slab(cfg, &mut out)?,
        Experiment::PsiDomination => psi(cfg, &mut out)?,
        Experiment::PhaseLabels => labels(cfg, &mut out)?,
        Experiment::CoveringCheck => covering(cfg, &mut out)?,
        Experiment::PivotalAudit => pivotal(cfg, &mut out)?,
        Experiment::SamplerCheck => sampler(cfg, &mut out)?,
        Experiment::EsCheck => es(cfg, &mut out)?,
        Experiment::Constants => constants(cfg, &mut out)?,
    }
    Ok(out)
}

/// Largest integrated autocorrelation time, in recorded samples, over the
/// first few replicas of the run's chain on `graph`.
fn mixing_diagnostic(
    cfg: &ExperimentConfig,
    graph: &Graph,
    pi: &BoundaryPartition,
    tag: &str,
    out: &mut Outcome,
) -> Result<(), RunError> {
    let n = replicas(cfg).min(8);
    let batches = sample_averaged(
        graph,
        &law(cfg)?,
        &params(cfg)?,
        pi,
        n,
        &schedule(cfg)?,
        cfg.seed,
    )?;
    let tau = batches
        .iter()
        .map(|(_, b)| b.autocorrelation)
        .fold(0.0, f64::max);
    out.push(ResultRecord {
        metric: format!("diagnostic.{tag}tau_max"),
        value: tau,
        std_err: None,
        replicas: n,
    });
    Ok(())
}

fn lambda_graph(cfg: &ExperimentConfig) -> Result<Graph, RunError> {
    Ok(Graph::new(&EdgeSet::wired(&LatticeBox::lambda_n(
        dim(cfg),
        cfg.i32("lattice.n")?,
    )?)))
}

fn enumerate(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let graph = enumerate_graph(cfg)?;
    let params = params(cfg)?;
    let m = graph.num_edges();
    out.push(ResultRecord::exact("edges", m as f64));
    let mut marginals = Vec::new();
    for wiring in [Wiring::Free, Wiring::Wired] {
        let pi = wiring.partition(&graph);
        let name = if wiring == Wiring::Free {
            "free"
        } else {
            "wired"
        };
        let mut marg = vec![0.0; m];
        if cfg.flag("enumerate.average") {
            for_each_media(m, &law(cfg)?, |media, w| {
                if w > 0.0 {
                    let t = exact_distribution(&graph, media, &params, &pi)?;
                    for (e, x) in marg.iter_mut().enumerate() {
                        *x += w * t.marginal(e);
                    }
                }
                Ok(())
            })?;
        } else {
            let media = vec![cfg.real("enumerate.coupling"); m];
            let t = exact_distribution(&graph, &media, &params, &pi)?;
            out.push(ResultRecord::exact(format!("{name}.log_z"), t.log_z()));
            marg = (0..m).map(|e| t.marginal(e)).collect();
        }
        for (e, x) in marg.iter().enumerate() {
            out.push(ResultRecord::exact(format!("{name}.marginal.e{e}"), *x));
        }
        marginals.push(marg);
    }
    for e in 0..m {
        if marginals[0][e] > marginals[1][e] + 1e-12 {
            out.violation(format!(
                "edge {e}: free marginal {} exceeds wired marginal {}",
                marginals[0][e], marginals[1][e]
            ));
        }
    }
    Ok(())
}

fn verify(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let options = CorpusOptions {
        max_edges: cfg.unsigned("verify.max_edges") as usize,
        p_grid: cfg.reals("verify.p_grid"),
        q_grid: cfg.reals("verify.q_grid"),
        verify: VerifyOptions {
            tolerance: cfg.real("verify.tolerance"),
            exhaustive_edges: cfg.unsigned("verify.exhaustive_edges") as usize,
            ..Default::default()
        },
    };
    let reports = verify_corpus(&options)?;
    let mut names: Vec<&str> = reports.iter().map(|r| r.inequality).collect();
    names.sort_unstable();
    names.dedup();
    out.push(ResultRecord::count("reports", reports.len(), 0));
    out.push(ResultRecord::count(
        "checks",
        reports.iter().map(|r| r.checks as usize).sum(),
        0,
    ));
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    out.push(ResultRecord::count("violations", failed.len(), 0));
    let worst = reports
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    out.push(ResultRecord::exact("worst_margin", worst));
    for name in names {
        let w = reports
            .iter()
            .filter(|r| r.inequality == name)
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min);
        out.push(ResultRecord::exact(format!("worst_margin.{name}"), w));
    }
    for r in failed {
        out.violation(format!(
            "{} {}: margin {:e} below -{:e}",
            r.instance, r.inequality, r.margin, r.tolerance
        ));
    }
    Ok(())
}

fn dlr(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let (lambda, p, q) = (
        cfg.real("dlr.lambda"),
        cfg.real("dlr.p"),
        cfg.real("model.q"),
    );
    let exact = averaged_conditional(lambda, p, q)?;
    let formula = dlr_conditional_formula(lambda, p, q);
    let failure = dlr_margin(lambda, p, q)?;
    out.push(ResultRecord::exact("conditional", exact));
    out.push(ResultRecord::exact("formula", formula));
    out.push(ResultRecord::exact("unconditional", lambda * p));
    out.push(ResultRecord::exact(
        "unconditional_sup",
        failure.unconditional_sup,
    ));
    out.push(ResultRecord::exact("margin", failure.margin));
    let residual = (exact - formula).abs();
    out.push(ResultRecord::exact("formula_residual", residual));
    if residual > 1e-12 {
        out.violation(format!(
            "enumerated conditional {exact} differs from the closed form {formula}"
        ));
    }
    if q > 1.0 && failure.margin <= 0.0 {
        out.violation(format!(
            "no excess over the unconditional law at q = {q}: margin {}",
            failure.margin
        ));
    }
    if q == 1.0 && failure.margin.abs() > 1e-12 {
        out.violation(format!("nonzero margin {} at q = 1", failure.margin));
    }
    Ok(())
}

fn crossing(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let policy = match cfg.raw("crossing.policy") {
        "free" => BcPolicy::Free,
        "worst" => BcPolicy::WorstOfSampled {
            random: cfg.unsigned("crossing.random_classes") as usize,
        },
        _ => BcPolicy::Wired,
    };
    let n = cfg.i32("lattice.n")?;
    let l = crossing_scale(cfg) as i32;
    let r = replicas(cfg);
    let res = crossing_experiment(
        dim(cfg),
        n,
        l,
        &law(cfg)?,
        &params(cfg)?,
        policy,
        r,
        &schedule(cfg)?,
        cfg.seed,
    )?;
    out.push(ResultRecord::exact("l", l as f64));
    out.push(ResultRecord::estimate("probability", &res.probability, r));
    for (name, e) in &res.per_class {
        out.push(ResultRecord::estimate(format!("class.{name}"), e, r));
    }
    let graph = lambda_graph(cfg)?;
    let pi = match policy {
        BcPolicy::Free => Wiring::Free.partition(&graph),
        _ => Wiring::Wired.partition(&graph),
    };
    mixing_diagnostic(cfg, &graph, &pi, "", out)
}

fn theta_pair(cfg: &ExperimentConfig, n: i32) -> Result<(Estimate, Estimate), RunError> {
    let (law, params, sched, r) = (law(cfg)?, params(cfg)?, schedule(cfg)?, replicas(cfg));
    let f = estimate_theta(
        dim(cfg),
        &[n],
        &law,
        &params,
        Wiring::Free,
        r,
        &sched,
        cfg.seed,
    )?;
    let w = estimate_theta(
        dim(cfg),
        &[n],
        &law,
        &params,
        Wiring::Wired,
        r,
        &sched,
        cfg.seed,
    )?;
    Ok((f[0].estimate, w[0].estimate))
}

fn density(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let r = replicas(cfg);
    let tn = cfg.i32("density.theta_n")?;
    let (tf, tw) = theta_pair(cfg, tn)?;
    out.push(ResultRecord::estimate("theta.free", &tf, r));
    out.push(ResultRecord::estimate("theta.wired", &tw, r));
    out.push(ResultRecord::exact("theta.z", z_difference(&tf, &tw)));
    let params = params(cfg)?;
    if let (Interaction::Ising { beta }, Some(2)) = (params.interaction, params.integer_q()) {
        let m =
            estimate_magnetization(dim(cfg), tn, &law(cfg)?, beta, r, &schedule(cfg)?, cfg.seed)?;
        out.push(ResultRecord::estimate("magnetization", &m, r));
        out.push(ResultRecord::exact(
            "magnetization.z",
            z_difference(&m, &tw),
        ));
    }
    let wiring = match cfg.raw("density.wiring") {
        "free" => Wiring::Free,
        _ => Wiring::Wired,
    };
    let eps = cfg.real("density.eps");
    let res = density_experiment(
        dim(cfg),
        cfg.i32("lattice.n")?,
        cfg.i32("lattice.l")?,
        &law(cfg)?,
        &params,
        wiring,
        (tf.mean, tw.mean),
        eps,
        r,
        &schedule(cfg)?,
        cfg.seed,
    )?;
    out.push(ResultRecord::exact("bracket.low", tf.mean - eps));
    out.push(ResultRecord::exact("bracket.high", tw.mean + eps));
    out.push(ResultRecord::estimate("density", &res.density, r));
    out.push(ResultRecord::count("outside", res.outside, r));
    out.push(ResultRecord::exact(
        "outside_frequency",
        res.outside_frequency,
    ));
    out.push(ResultRecord::estimate("blocks.upper", &res.upper_blocks, r));
    if let Some(low) = &res.lower_blocks {
        out.push(ResultRecord::estimate("blocks.lower", low, r));
    }
    let graph = lambda_graph(cfg)?;
    mixing_diagnostic(cfg, &graph, &wiring.partition(&graph), "", out)
}

fn theta(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let ns: Vec<i32> = cfg.ints("theta.ns").iter().map(|&n| n as i32).collect();
    let wirings: &[(Wiring, &str)] = match cfg.raw("theta.wiring") {
        "free" => &[(Wiring::Free, "free")],
        "wired" => &[(Wiring::Wired, "wired")],
        _ => &[(Wiring::Free, "free"), (Wiring::Wired, "wired")],
    };
    let r = replicas(cfg);
    for &(w, name) in wirings {
        let pts = estimate_theta(
            dim(cfg),
            &ns,
            &law(cfg)?,
            &params(cfg)?,
            w,
            r,
            &schedule(cfg)?,
            cfg.seed,
        )?;
        for p in pts {
            out.push(ResultRecord::estimate(
                format!("theta.{name}.n{}", p.n),
                &p.estimate,
                r,
            ));
        }
        let n = *ns.iter().max().expect("nonempty list");
        let graph = Graph::new(&EdgeSet::wired(&LatticeBox::lambda_hat(dim(cfg), n)?));
        mixing_diagnostic(cfg, &graph, &w.partition(&graph), &format!("{name}."), out)?;
    }
    Ok(())
}

fn slab(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let r = replicas(cfg);
    let res = slab_probe(
        dim(cfg),
        cfg.i32("lattice.n")?,
        cfg.i32("slab.h")?,
        cfg.unsigned("slab.pairs") as usize,
        &law(cfg)?,
        &params(cfg)?,
        r,
        &schedule(cfg)?,
        cfg.seed,
    )?;
    if let Some(e) = &res.min_connectivity {
        out.push(ResultRecord::estimate("min_connectivity", e, r));
    }
    for (k, (_, _, e)) in res.pairs.iter().enumerate() {
        out.push(ResultRecord::estimate(format!("pair.{k}"), e, r));
    }
    if let Some(e) = &res.crossing {
        out.push(ResultRecord::estimate("crossing", e, r));
    }
    out.push(ResultRecord::estimate("isolated", &res.isolated, r));
    Ok(())
}

fn psi(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let r = replicas(cfg);
    let opts = PsiOptions {
        exact_limit: cfg.unsigned("psi.exact_limit") as usize,
        sweeps: cfg.unsigned("psi.block_sweeps"),
    };
    let res = psi_domination(
        dim(cfg),
        cfg.i32("lattice.l")?,
        &law(cfg)?,
        &params(cfg)?,
        r,
        &schedule(cfg)?,
        opts,
        cfg.real("psi.alpha"),
        cfg.seed,
    )?;
    out.push(ResultRecord::exact("critical", res.forward.critical));
    out.push(ResultRecord::count("events", res.forward.outcomes.len(), r));
    out.push(ResultRecord::count(
        "forward.rejections",
        res.forward.rejections(),
        r,
    ));
    out.push(ResultRecord::count(
        "swapped.rejections",
        res.swapped.rejections(),
        r,
    ));
    for (tag, rep) in [("forward", &res.forward), ("swapped", &res.swapped)] {
        for o in &rep.outcomes {
            out.push(ResultRecord::exact(
                format!("{tag}.{}.z", slug(&o.event)),
                o.z,
            ));
        }
    }
    for o in &res.forward.outcomes {
        out.push(ResultRecord::estimate(
            format!("psi.{}", slug(&o.event)),
            &o.a,
            r,
        ));
        out.push(ResultRecord::estimate(
            format!("free.{}", slug(&o.event)),
            &o.b,
            r,
        ));
    }
    Ok(())
}

fn labels(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let r = replicas(cfg);
    let (law, sched, beta) = (law(cfg)?, schedule(cfg)?, cfg.real("model.beta"));
    let m_beta = match cfg.real_or_auto("labels.m_beta") {
        Some(m) => m,
        None => {
            let m = estimate_magnetization(
                dim(cfg),
                cfg.i32("labels.theta_n")?,
                &law,
                beta,
                r,
                &sched,
                cfg.seed,
            )?;
            out.push(ResultRecord::estimate("m_beta.estimate", &m, r));
            m.mean.clamp(0.0, 1.0)
        }
    };
    let lp = LabelParams {
        delta: cfg.real("labels.delta"),
        delta_prime: cfg.real("labels.delta_prime"),
        ..LabelParams::new(m_beta)
    };
    let res = phase_label_experiment(
        dim(cfg),
        cfg.i32("lattice.n")?,
        cfg.i32("lattice.l")?,
        &law,
        beta,
        &lp,
        r,
        &sched,
        cfg.seed,
    )?;
    out.push(ResultRecord::exact("m_beta", m_beta));
    out.push(ResultRecord::count("samples", res.samples, r));
    out.push(ResultRecord::count("labels.plus", res.plus, r));
    out.push(ResultRecord::count("labels.zero", res.zero, r));
    out.push(ResultRecord::count("labels.minus", res.minus, r));
    out.push(ResultRecord::estimate(
        "magnetization",
        &res.magnetization,
        r,
    ));
    out.push(ResultRecord::count("violations", res.violations.len(), r));
    for (rep, sweep, msg) in &res.violations {
        out.violation(format!("replica {rep}, sweep {sweep}: {msg}"));
    }
    Ok(())
}

/// Every side tuple in `{1, …, max_side}^d`.
fn covering_boxes(d: usize, max_side: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|s: Vec<i32>| {
                (1..=max_side).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

fn covering(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    use rayon::prelude::*;
    let max_side = cfg.int("covering.max_side") as i32;
    for d in cfg.ints("covering.dims") {
        let d = d as usize;
        let boxes = covering_boxes(d, max_side);
        let rows: Vec<(usize, usize, usize, Vec<String>)> = boxes
            .par_iter()
            .map(|sides| {
                let ranges: Vec<(i32, i32)> = sides.iter().map(|&s| (1, s)).collect();
                let lam = LatticeBox::from_ranges(&ranges).expect("nonempty box");
                let min = *sides.iter().min().expect("d >= 1");
                let (mut count, mut worst, mut fails) = (0usize, 0usize, Vec::new());
                for l in 1..=min {
                    for lp in 0..=l.min((min - l) / 2) {
                        let cov = Covering::new(&lam, l, lp).expect("admissible parameters");
                        let audit = cov.audit();
                        count += 1;
                        worst = worst.max(audit.max_multiplicity);
                        fails.extend(
                            audit
                                .failures
                                .into_iter()
                                .map(|f| format!("sides {sides:?}, L = {l}, L' = {lp}: {f}")),
                        );
                    }
                }
                (count, worst, fails.len(), fails)
            })
            .collect();
        let coverings: usize = rows.iter().map(|r| r.0).sum();
        let worst = rows.iter().map(|r| r.1).max().unwrap_or(0);
        let failures: usize = rows.iter().map(|r| r.2).sum();
        out.push(ResultRecord::count(format!("d{d}.boxes"), boxes.len(), 0));
        out.push(ResultRecord::count(format!("d{d}.coverings"), coverings, 0));
        out.push(ResultRecord::count(format!("d{d}.failures"), failures, 0));
        out.push(ResultRecord::count(
            format!("d{d}.max_multiplicity"),
            worst,
            0,
        ));
        out.push(ResultRecord::count(
            format!("d{d}.multiplicity_bound"),
            6usize.pow(d as u32),
            0,
        ));
        for f in rows.into_iter().flat_map(|r| r.3) {
            out.violation(f);
        }
    }
    Ok(())
}

fn pivotal(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    use rayon::prelude::*;
    let side = cfg.int("pivotal.side") as i32;
    let p = cfg.real("pivotal.p");
    let configs = cfg.unsigned("pivotal.configs");
    let bx = LatticeBox::from_ranges(&[(1, side), (1, side)])?;
    let graph = Graph::new(&EdgeSet::free(&bx));
    let nv = graph.num_vertices() as u32;
    let rows = (0..configs)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(cfg.seed, k, 0);
            let omega: Vec<bool> = (0..graph.num_edges())
                .map(|_| rng.gen::<f64>() < p)
                .collect();
            let x = rng.gen_range(0..nv);
            let mut y = rng.gen_range(0..nv - 1);
            if y >= x {
                y += 1;
            }
            let report = fk_core::cluster::first_pivotal_bond(&graph, &omega, x, y)?;
            let issues = audit_pivotal(&graph, &omega, x, y)?;
            Ok((k, report.pivotal.len(), issues))
        })
        .collect::<fk_core::Result<Vec<_>>>()?;
    let with = rows.iter().filter(|r| r.1 > 0).count();
    let total: usize = rows.iter().map(|r| r.1).sum();
    let bad = rows.iter().filter(|r| !r.2.is_empty()).count();
    out.push(ResultRecord::count("configs", rows.len(), configs));
    out.push(ResultRecord::count("with_pivotal", with, configs));
    out.push(ResultRecord::count("pivotal_bonds", total, configs));
    out.push(ResultRecord::count("disagreements", bad, configs));
    for (k, _, issues) in rows {
        for i in issues {
            out.violation(format!("configuration {k}: {i}"));
        }
    }
    Ok(())
}

/// The unit square `{0,1}^2` with its four edges.
pub fn unit_square() -> Graph {
    let pt = |x, y| Point::new(&[x, y]).expect("two coordinates");
    let edges = vec![
        Edge::new(pt(0, 0), pt(1, 0)),
        Edge::new(pt(0, 1), pt(1, 1)),
        Edge::new(pt(0, 0), pt(0, 1)),
        Edge::new(pt(1, 0), pt(1, 1)),
    ];
    let edges: Vec<Edge> = edges.into_iter().map(|e| e.expect("unit edge")).collect();
    Graph::new(&EdgeSet::explicit(edges).expect("distinct edges"))
}

fn sampler(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let graph = unit_square();
    let m = graph.num_edges();
    let p = cfg.real("sampler.p");
    let q = cfg.real("model.q");
    let probs = vec![p; m];
    let sweeps = cfg.unsigned("sampler.sweeps");
    let batches = cfg.unsigned("sampler.batches") as usize;
    let per_batch = sweeps / batches as u64;
    let burn_in = cfg.unsigned("schedule.burn_in");
    let scan = schedule(cfg)?.scan;
    let n = graph.boundary_span().len();
    for (k, (name, pi)) in [
        ("free", BoundaryPartition::free(n)),
        ("wired", BoundaryPartition::wired(n)),
    ]
    .into_iter()
    .enumerate()
    {
        let exact = exact_from_probs(&graph, &probs, q, &pi)?;
        let kernels = heat_bath_kernels(&graph, &probs, q, &pi)?;
        let db = detailed_balance_residual(&kernels, exact.probs());
        let st = stationarity_residual(&sweep_kernel(&kernels), exact.probs());
        let mut chain = ChainState::with_probs(
            &graph,
            probs.clone(),
            q,
            &pi,
            substream(cfg.seed, k as u64, 1),
        )?;
        for _ in 0..burn_in {
            chain.sweep(scan);
        }
        let mut counts = vec![vec![0u64; 1 << m]; batches];
        for row in counts.iter_mut() {
            for _ in 0..per_batch {
                chain.sweep(scan);
                row[chain.config().mask() as usize] += 1;
            }
        }
        let mut max_z: f64 = 0.0;
        for mask in 0..1usize << m {
            let freqs: Vec<f64> = counts
                .iter()
                .map(|row| row[mask] as f64 / per_batch as f64)
                .collect();
            let est = Estimate::from_samples(&freqs);
            let target = Estimate {
                mean: exact.prob(mask as u64),
                std_err: 0.0,
                n: 1,
            };
            let z = z_difference(&est, &target);
            max_z = max_z.max(z.abs());
            out.push(ResultRecord {
                metric: format!("{name}.freq.m{mask:02}"),
                value: est.mean,
                std_err: Some(est.std_err),
                replicas: per_batch * batches as u64,
            });
            out.push(ResultRecord::exact(
                format!("{name}.exact.m{mask:02}"),
                target.mean,
            ));
            out.push(ResultRecord::exact(format!("{name}.z.m{mask:02}"), z));
        }
        out.push(ResultRecord::exact(format!("{name}.max_abs_z"), max_z));
        out.push(ResultRecord::exact(format!("{name}.detailed_balance"), db));
        out.push(ResultRecord::exact(format!("{name}.stationarity"), st));
        if db > 1e-10 {
            out.violation(format!("{name}: detailed-balance residual {db:e}"));
        }
        if st > 1e-10 {
            out.violation(format!("{name}: sweep stationarity residual {st:e}"));
        }
    }
    Ok(())
}

fn es(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let sys = es_system(cfg)?;
    let m = sys.graph.num_edges();
    let n = sys.sites.len();
    let joint = sys.es_joint_exact()?;
    let mu = sys.ising_exact()?;
    let spin_marg: Vec<f64> = (0..1usize << n)
        .map(|s| (0..1usize << m).map(|b| joint[s << m | b]).sum())
        .collect();
    let bond_marg: Vec<f64> = (0..1usize << m)
        .map(|b| (0..1usize << n).map(|s| joint[s << m | b]).sum())
        .collect();
    let params = FkParams::new(2.0, Interaction::Ising { beta: sys.beta })?;
    let fk = exact_distribution(
        &sys.graph,
        &sys.media,
        &params,
        &Wiring::Wired.partition(&sys.graph),
    )?;
    let kernel = sys.sw_kernel()?;
    let tv_spin = tv(&spin_marg, &mu);
    let tv_bond = tv(&bond_marg, fk.probs());
    let stat = stationarity_residual(&kernel, &mu);
    let rows = kernel
        .iter()
        .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(ResultRecord::exact("sites", n as f64));
    out.push(ResultRecord::exact("edges", m as f64));
    out.push(ResultRecord::exact("tv.spins", tv_spin));
    out.push(ResultRecord::exact("tv.bonds", tv_bond));
    out.push(ResultRecord::exact("sw.stationarity", stat));
    out.push(ResultRecord::exact("sw.row_sums", rows));
    for (what, v) in [
        ("spin marginal", tv_spin),
        ("bond marginal", tv_bond),
        ("SW stationarity", stat),
        ("SW row sums", rows),
    ] {
        if v > 1e-10 {
            out.violation(format!("{what}: residual {v:e}"));
        }
    }
    Ok(())
}

fn constants(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), RunError> {
    let grid = cfg.unsigned("constants.grid") as usize;
    for k in 2..=cfg.unsigned("constants.k_max") as u32 {
        let thr = lss_threshold(k);
        let r1 = r_lss(k, 1.0)?;
        let rp1 = r_prime(k, 1.0)?;
        out.push(ResultRecord::exact(format!("k{k}.threshold"), thr));
        out.push(ResultRecord::exact(format!("k{k}.r_at_one"), r1));
        out.push(ResultRecord::exact(format!("k{k}.r_prime_at_one"), rp1));
        if r1 != 1.0 || rp1 != 1.0 {
            out.violation(format!("K = {k}: r(K, 1) = {r1}, r'(K, 1) = {rp1}"));
        }
        let mut prev = f64::NEG_INFINITY;
        let mut drops = 0;
        for j in 0..grid {
            let p = thr + (1.0 - thr) * j as f64 / (grid - 1) as f64;
            let r = r_lss(k, p.min(1.0))?;
            if r < prev {
                drops += 1;
            }
            prev = r;
        }
        out.push(ResultRecord::count(
            format!("k{k}.monotonicity_drops"),
            drops,
            0,
        ));
        if drops > 0 {
            out.violation(format!("K = {k}: r decreases {drops} times on the grid"));
        }
        let below = thr - 1e-9 * thr.max(1e-3);
        let guarded = r_lss(k, below).is_err();
        out.push(ResultRecord::exact(
            format!("k{k}.guarded"),
            guarded as u8 as f64,
        ));
        if !guarded {
            out.violation(format!(
                "K = {k}: r accepted p = {below} below the threshold {thr}"
            ));
        }
    }
    let at_zero = legendre_lambda_star(0.0)?;
    let (mut asym, mut excess) = (0.0f64, f64::INFINITY);
    for j in 1..=99 {
        let x = -1.0 + j as f64 / 50.0;
        let a = legendre_lambda_star(x)?;
        asym = asym.max((a - legendre_lambda_star(-x)?).abs());
        excess = excess.min(a - x * x / 2.0);
    }
    out.push(ResultRecord::exact("lambda_star.at_zero", at_zero));
    out.push(ResultRecord::exact("lambda_star.asymmetry", asym));
    out.push(ResultRecord::exact("lambda_star.min_excess", excess));
    if at_zero != 0.0 {
        out.violation(format!("Λ*(0) = {at_zero}"));
    }
    if asym > 1e-12 {
        out.violation(format!("Λ* asymmetric by {asym:e}"));
    }
    if excess < -1e-12 {
        out.violation(format!("Λ*(x) < x²/2 by {:e}", -excess));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert!(e.keys().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn covering_box_lists() {
        assert_eq!(covering_boxes(2, 3).len(), 9);
        assert_eq!(covering_boxes(3, 3).len(), 27);
    }

    #[test]
    fn unit_square_has_four_boundary_vertices() {
        let g = unit_square();
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.boundary_span().len(), 4);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("left-right crossing"), "left-right-crossing");
        assert_eq!(slug("at least 3 open edges"), "at-least-3-open-edges");
    }
}
