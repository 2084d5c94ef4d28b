//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Artifacts are written under `$CARGO_TARGET_TMPDIR/acceptance/` and
//! re-executed by the reproducibility criterion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fk_coarse::{reproduce, run, Experiment, ExperimentConfig, Outcome};
use fk_core::fk::{exact_from_probs, p_tilde, BoundaryPartition};
use fk_core::ising::legendre_lambda_star;
use fk_core::lattice::{Edge, EdgeSet, Graph, Point};
use fk_core::verify::{averaged_conditional, dlr_conditional_formula, dlr_margin};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

struct Suite {
    root: PathBuf,
    artifacts: Vec<(String, PathBuf)>,
    failures: Vec<usize>,
}

impl Suite {
    fn experiment(
        &mut self,
        label: &str,
        experiment: Experiment,
        seed: u64,
        set: &[(&str, &str)],
    ) -> Outcome {
        let raw: BTreeMap<String, String> = set
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let cfg = ExperimentConfig::build(experiment, &raw, &[], Some(seed))
            .unwrap_or_else(|e| panic!("{label}: {e}"));
        let dir = self.root.join(label);
        let (outcome, artifacts) = run(&cfg, &dir).unwrap_or_else(|e| panic!("{label}: {e}"));
        self.artifacts.push((label.to_string(), artifacts.jsonl));
        outcome
    }

    fn check(&mut self, id: usize, budget_secs: f64, f: impl FnOnce(&mut Suite) -> Verdict) {
        let start = Instant::now();
        let v = f(self);
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= budget_secs;
        let pass = v.pass && in_time;
        if !pass {
            self.failures.push(id);
        }
        let timing = if in_time {
            format!("{secs:.1} s")
        } else {
            format!("{secs:.1} s, over the {budget_secs} s budget")
        };
        println!(
            "criterion {id:>2}  {}  {}  ({timing})",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
}

fn val(o: &Outcome, metric: &str) -> f64 {
    o.value(metric)
        .unwrap_or_else(|| panic!("missing metric {metric}"))
}

fn grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

const QS: [f64; 4] = [1.0, 1.5, 2.0, 4.0];

fn single_edge() -> Verdict {
    let x = Point::new(&[0, 0]).unwrap();
    let y = Point::new(&[1, 0]).unwrap();
    let g = Graph::new(&EdgeSet::explicit(vec![Edge::new(x, y).unwrap()]).unwrap());
    let n = g.boundary_span().len();
    let mut worst: f64 = 0.0;
    for p in grid() {
        for q in QS {
            let wired = exact_from_probs(&g, &[p], q, &BoundaryPartition::wired(n))
                .unwrap()
                .marginal(0);
            let free = exact_from_probs(&g, &[p], q, &BoundaryPartition::free(n))
                .unwrap()
                .marginal(0);
            worst = worst
                .max((wired - p).abs())
                .max((free - p_tilde(p, q)).abs());
        }
    }
    verdict(
        worst <= 1e-12,
        format!("single-edge marginals: max error {worst:.1e} over 36 (p, q)"),
    )
}

fn dlr() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut q1: f64 = 0.0;
    for lambda in grid() {
        for p in grid() {
            for q in QS {
                let c = averaged_conditional(lambda, p, q).unwrap();
                worst = worst.max((c - dlr_conditional_formula(lambda, p, q)).abs());
            }
            q1 = q1.max(dlr_margin(lambda, p, 1.0).unwrap().margin.abs());
        }
    }
    let c = averaged_conditional(0.5, 0.5, 2.0).unwrap();
    let m = dlr_margin(0.5, 0.5, 2.0).unwrap();
    let ok = worst <= 1e-12
        && (c - 3.0 / 11.0).abs() <= 1e-12
        && (m.margin - 1.0 / 44.0).abs() <= 1e-12
        && q1 <= 1e-12;
    verdict(
        ok,
        format!(
            "formula error {worst:.1e}; value at λ=p=1/2, q=2 is {c:.15} (3/11), excess {:.15} (1/44); |margin| at q=1 <= {q1:.1e}",
            m.margin
        ),
    )
}

fn lambda_star() -> Verdict {
    let zero = legendre_lambda_star(0.0).unwrap();
    let (mut asym, mut excess) = (0.0f64, f64::INFINITY);
    for j in 1..=99 {
        let x = -1.0 + j as f64 / 50.0;
        let v = legendre_lambda_star(x).unwrap();
        asym = asym.max((v - legendre_lambda_star(-x).unwrap()).abs());
        excess = excess.min(v - x * x / 2.0);
    }
    verdict(
        zero == 0.0 && asym <= 1e-12 && excess >= -1e-12,
        format!(
            "Λ*(0) = {zero}, asymmetry {asym:.1e}, min Λ*(x) - x²/2 = {excess:.2e} on 99 points"
        ),
    )
}

fn main() {
    let root = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let _ = std::fs::remove_dir_all(&root);
    let mut s = Suite {
        root,
        artifacts: Vec::new(),
        failures: Vec::new(),
    };
    println!("acceptance artifacts in {}", s.root.display());

    s.check(1, 1.0, |_| single_edge());
    s.check(2, 1.0, |_| dlr());

    s.check(3, 600.0, |s| {
        let o = s.experiment("verify", Experiment::Verify, 1, &[]);
        verdict(
            o.violations.is_empty() && val(&o, "violations") == 0.0,
            format!(
                "{} reports, {} violations, worst margin {:.1e}",
                val(&o, "reports"),
                val(&o, "violations"),
                val(&o, "worst_margin")
            ),
        )
    });

    s.check(4, 120.0, |s| {
        let o = s.experiment(
            "sampler-check",
            Experiment::SamplerCheck,
            4,
            &[("sampler.p", "0.6"), ("model.q", "2"), ("sampler.sweeps", "1000000"), ("sampler.batches", "100")],
        );
        let (zf, zw) = (val(&o, "free.max_abs_z"), val(&o, "wired.max_abs_z"));
        let db = val(&o, "free.detailed_balance").max(val(&o, "wired.detailed_balance"));
        verdict(
            zf <= 3.0 && zw <= 3.0 && db < 1e-10 && o.violations.is_empty(),
            format!("max |z| over 16 frequencies: free {zf:.2}, wired {zw:.2}; detailed-balance residual {db:.1e}"),
        )
    });

    s.check(5, 120.0, |s| {
        let o = s.experiment(
            "es-check",
            Experiment::EsCheck,
            5,
            &[("es.sides", "2,2"), ("model.beta", "0.7")],
        );
        let (ts, tb, st) = (
            val(&o, "tv.spins"),
            val(&o, "tv.bonds"),
            val(&o, "sw.stationarity"),
        );
        verdict(
            ts < 1e-10 && tb < 1e-10 && st < 1e-10,
            format!("2x2 box: TV spins {ts:.1e}, TV bonds {tb:.1e}, SW stationarity {st:.1e}"),
        )
    });

    s.check(6, 300.0, |s| {
        let o = s.experiment(
            "pivotal-audit",
            Experiment::PivotalAudit,
            6,
            &[
                ("pivotal.side", "5"),
                ("pivotal.configs", "1000"),
                ("pivotal.p", "0.6"),
            ],
        );
        verdict(
            o.violations.is_empty(),
            format!(
                "{} configurations, {} with pivotal bonds, {} disagreements",
                val(&o, "configs"),
                val(&o, "with_pivotal"),
                val(&o, "disagreements")
            ),
        )
    });

    s.check(7, 300.0, |s| {
        let o = s.experiment(
            "covering-check",
            Experiment::CoveringCheck,
            7,
            &[("covering.max_side", "20"), ("covering.dims", "2,3")],
        );
        verdict(
            o.violations.is_empty(),
            format!(
                "d=2: {} coverings, d=3: {} coverings, {} failures; max halo multiplicity {} (<= 36), {} (<= 216)",
                val(&o, "d2.coverings"),
                val(&o, "d3.coverings"),
                val(&o, "d2.failures") + val(&o, "d3.failures"),
                val(&o, "d2.max_multiplicity"),
                val(&o, "d3.max_multiplicity")
            ),
        )
    });

    s.check(8, 1.0, |s| {
        let o = s.experiment("constants", Experiment::Constants, 8, &[("constants.k_max", "8"), ("constants.grid", "1000")]);
        let ones = (2..=8).all(|k| val(&o, &format!("k{k}.r_at_one")) == 1.0 && val(&o, &format!("k{k}.r_prime_at_one")) == 1.0);
        let guards = (2..=8).all(|k| val(&o, &format!("k{k}.guarded")) == 1.0);
        let drops: f64 = (2..=8).map(|k| val(&o, &format!("k{k}.monotonicity_drops"))).sum();
        verdict(
            ones && guards && drops == 0.0 && o.violations.is_empty(),
            format!("r(K,1) = r'(K,1) = 1: {ones}; monotonicity drops {drops}; domain guards enforced: {guards}"),
        )
    });

    s.check(9, 900.0, |s| {
        let o = s.experiment(
            "psi-domination",
            Experiment::PsiDomination,
            9,
            &[
                ("lattice.d", "2"),
                ("lattice.l", "6"),
                ("model.q", "2"),
                ("model.interaction", "linear"),
                ("model.slope", "0.75"),
                ("model.disorder", "bernoulli:0.8"),
                ("schedule.replicas", "10000"),
                ("schedule.sweeps", "300"),
                ("schedule.burn_in", "100"),
                ("schedule.thin", "100"),
                ("psi.alpha", "0.01"),
            ],
        );
        let (fwd, swp, ev) = (val(&o, "forward.rejections"), val(&o, "swapped.rejections"), val(&o, "events"));
        verdict(
            fwd == 0.0 && swp > 0.0 && ev == 20.0,
            format!("{ev} events, Bonferroni z* = {:.3}: Ψ ≤ 𝔼Φᶠ rejected {fwd} times; swapped fixture rejected {swp} times", val(&o, "critical")),
        )
    });

    s.check(10, 1200.0, |s| {
        let perc = |slope: &'static str, n: &'static str| -> Vec<(&'static str, &'static str)> {
            vec![
                ("lattice.d", "2"),
                ("lattice.n", n),
                ("crossing.l", "0"),
                ("crossing.policy", "wired"),
                ("model.q", "1"),
                ("model.interaction", "linear"),
                ("model.slope", slope),
                ("model.disorder", "bernoulli:0.9"),
                ("schedule.replicas", "1000"),
                ("schedule.sweeps", "2"),
                ("schedule.burn_in", "1"),
                ("schedule.thin", "1"),
            ]
        };
        let mut ps = Vec::new();
        for n in ["16", "32", "64"] {
            let o = s.experiment(&format!("crossing-n{n}"), Experiment::Crossing, 10, &perc("0.9", n));
            ps.push(val(&o, "probability"));
        }
        let o = s.experiment("crossing-subcritical", Experiment::Crossing, 10, &perc("0.3333333333333333", "64"));
        let sub = val(&o, "probability");
        verdict(
            ps[2] >= 0.95 && ps[0] <= ps[1] && ps[1] <= ps[2] && sub <= 0.1,
            format!(
                "𝔼p = 0.81: P(crossing and unique large) = {:.3}, {:.3}, {:.3} at N = 16, 32, 64; 𝔼p = 0.3: {sub:.3} at N = 64",
                ps[0], ps[1], ps[2]
            ),
        )
    });

    let ising: Vec<(&str, &str)> = vec![
        ("lattice.d", "2"),
        ("lattice.n", "64"),
        ("lattice.l", "16"),
        ("model.q", "2"),
        ("model.interaction", "ising"),
        ("model.beta", "1"),
        ("model.disorder", "bernoulli:0.8"),
        ("schedule.replicas", "1000"),
        ("schedule.sweeps", "300"),
        ("schedule.burn_in", "100"),
        ("schedule.thin", "20"),
    ];
    s.check(11, 1800.0, |s| {
        let mut set = ising.clone();
        set.extend([("density.theta_n", "32"), ("density.eps", "0.05"), ("density.wiring", "wired")]);
        let o = s.experiment("density", Experiment::Density, 11, &set);
        let (freq, tz, mz) = (val(&o, "outside_frequency"), val(&o, "theta.z"), val(&o, "magnetization.z"));
        verdict(
            freq <= 0.05 && tz.abs() <= 3.0 && mz.abs() <= 3.0,
            format!(
                "N=64 density {:.4} outside [{:.4}, {:.4}] in {:.1}% of replicas; N=32 θᶠ {:.4}, θʷ {:.4} (z = {tz:.2}); m {:.4} vs θʷ (z = {mz:.2})",
                val(&o, "density"),
                val(&o, "bracket.low"),
                val(&o, "bracket.high"),
                100.0 * freq,
                val(&o, "theta.free"),
                val(&o, "theta.wired"),
                val(&o, "magnetization")
            ),
        )
    });

    s.check(12, 1800.0, |s| {
        let mut set: Vec<(&str, &str)> = ising
            .iter()
            .filter(|(k, _)| !k.starts_with("model.q") && *k != "model.interaction")
            .copied()
            .collect();
        set.extend([("labels.theta_n", "32"), ("labels.m_beta", "auto")]);
        let o = s.experiment("phase-labels", Experiment::PhaseLabels, 11, &set);
        s.artifacts.pop();
        verdict(
            o.violations.is_empty(),
            format!(
                "{} samples, labels +1/0/-1 = {}/{}/{}, m_β = {:.4}, {} violations",
                val(&o, "samples"),
                val(&o, "labels.plus"),
                val(&o, "labels.zero"),
                val(&o, "labels.minus"),
                val(&o, "m_beta"),
                o.violations.len()
            ),
        )
    });

    s.check(13, 1.0, |_| lambda_star());

    s.check(14, f64::INFINITY, |s| {
        let mut bad = Vec::new();
        for (label, path) in &s.artifacts {
            if label == "verify" {
                continue;
            }
            match reproduce(path) {
                Ok(r) if r.identical() => {}
                Ok(r) => bad.push(format!("{label}: {}", r.diffs.join("; "))),
                Err(e) => bad.push(format!("{label}: {e}")),
            }
        }
        let n = s.artifacts.iter().filter(|(l, _)| l != "verify").count();
        verdict(
            bad.is_empty(),
            if bad.is_empty() {
                format!("{n} artifacts reproduced byte-identically")
            } else {
                format!("{} of {n} artifacts differ: {}", bad.len(), bad.join(" | "))
            },
        )
    });

    if s.failures.is_empty() {
        println!("all 14 criteria passed");
    } else {
        println!("failed criteria: {:?}", s.failures);
        std::process::exit(1);
    }
}
