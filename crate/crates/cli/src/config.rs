//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! seed = 7
//! [lattice]
//! d = 2
//! n = 32
//! ```
//!
//! Section headers prefix the keys that follow (`lattice.n`); a dotted key
//! may also be written in full. Overrides given on the command line use the
//! dotted form and win over the file.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::experiments::Experiment;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

pub(crate) fn config_error(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Int,
    Unsigned,
    Real,
    /// A real or the word `auto`.
    RealOrAuto,
    Bool,
    IntList,
    RealList,
    Choice(&'static [&'static str]),
    /// A disorder law: `bernoulli:λ`, `dirac:v`, `uniform:a:b` or `atoms:v@w,…`.
    Disorder,
}

pub struct KeyDef {
    pub key: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub doc: &'static str,
}

const fn def(key: &'static str, kind: Kind, default: &'static str, doc: &'static str) -> KeyDef {
    KeyDef {
        key,
        kind,
        default,
        doc,
    }
}

/// Every accepted key, with its default.
pub const SCHEMA: &[KeyDef] = &[
    def("lattice.d", Kind::Unsigned, "2", "dimension"),
    def("lattice.n", Kind::Int, "32", "box parameter N"),
    def("lattice.l", Kind::Int, "8", "block scale L"),
    def("model.q", Kind::Real, "2", "cluster weight q >= 1"),
    def(
        "model.interaction",
        Kind::Choice(&["ising", "potts", "linear"]),
        "ising",
        "coupling to edge probability map",
    ),
    def("model.beta", Kind::Real, "1", "inverse temperature"),
    def(
        "model.slope",
        Kind::Real,
        "1",
        "slope of the linear map p(J) = slope * J",
    ),
    def(
        "model.disorder",
        Kind::Disorder,
        "bernoulli:0.8",
        "law of the couplings",
    ),
    def(
        "schedule.replicas",
        Kind::Unsigned,
        "100",
        "disorder replicas",
    ),
    def(
        "schedule.sweeps",
        Kind::Unsigned,
        "1100",
        "sweeps per replica",
    ),
    def(
        "schedule.burn_in",
        Kind::Unsigned,
        "100",
        "discarded sweeps",
    ),
    def(
        "schedule.thin",
        Kind::Unsigned,
        "10",
        "sweeps between recorded samples",
    ),
    def(
        "schedule.dynamics",
        Kind::Choice(&["auto", "heat-bath", "swendsen-wang"]),
        "auto",
        "Markov chain",
    ),
    def(
        "schedule.scan",
        Kind::Choice(&["systematic", "random"]),
        "systematic",
        "heat-bath edge order",
    ),
    def(
        "enumerate.sides",
        Kind::IntList,
        "2,2",
        "sides of the enumerated box",
    ),
    def(
        "enumerate.edges",
        Kind::Choice(&["free", "wired"]),
        "free",
        "edge set of the box",
    ),
    def(
        "enumerate.coupling",
        Kind::Real,
        "1",
        "uniform coupling when not averaging",
    ),
    def(
        "enumerate.average",
        Kind::Bool,
        "false",
        "average over the disorder law",
    ),
    def(
        "verify.max_edges",
        Kind::Unsigned,
        "5",
        "largest bond animal",
    ),
    def(
        "verify.exhaustive_edges",
        Kind::Unsigned,
        "4",
        "edge count up to which every up-set is checked",
    ),
    def(
        "verify.tolerance",
        Kind::Real,
        "1e-12",
        "allowed negative margin",
    ),
    def(
        "verify.p_grid",
        Kind::RealList,
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
        "edge probabilities",
    ),
    def(
        "verify.q_grid",
        Kind::RealList,
        "1,1.5,2,4",
        "cluster weights",
    ),
    def("dlr.lambda", Kind::Real, "0.5", "Bernoulli dilution"),
    def(
        "dlr.p",
        Kind::Real,
        "0.5",
        "edge probability of a unit coupling",
    ),
    def("crossing.l", Kind::Int, "8", "diameter threshold"),
    def(
        "crossing.policy",
        Kind::Choice(&["free", "wired", "worst"]),
        "wired",
        "boundary classes",
    ),
    def(
        "crossing.random_classes",
        Kind::Unsigned,
        "4",
        "random classes for the worst policy",
    ),
    def("density.eps", Kind::Real, "0.05", "bracket half-width"),
    def(
        "density.theta_n",
        Kind::Int,
        "16",
        "N of the theta estimates",
    ),
    def(
        "density.wiring",
        Kind::Choice(&["free", "wired"]),
        "wired",
        "boundary condition of the density run",
    ),
    def("theta.ns", Kind::IntList, "4,8,16", "values of N"),
    def(
        "theta.wiring",
        Kind::Choice(&["free", "wired", "both"]),
        "both",
        "boundary conditions",
    ),
    def(
        "slab.h",
        Kind::Int,
        "4",
        "slab height H, or kappa(N) when d = 2",
    ),
    def(
        "slab.pairs",
        Kind::Unsigned,
        "8",
        "sampled pairs when d >= 3",
    ),
    def("psi.alpha", Kind::Real, "0.01", "family-wise level"),
    def(
        "psi.exact_limit",
        Kind::Unsigned,
        "12",
        "largest block sampled exactly",
    ),
    def(
        "psi.block_sweeps",
        Kind::Unsigned,
        "100",
        "heat-bath sweeps per larger block",
    ),
    def("labels.delta", Kind::Real, "0.1", "magnetisation tolerance"),
    def(
        "labels.delta_prime",
        Kind::Real,
        "0.01",
        "isolated-cluster density",
    ),
    def(
        "labels.m_beta",
        Kind::RealOrAuto,
        "auto",
        "plus-phase magnetisation, or estimated",
    ),
    def(
        "labels.theta_n",
        Kind::Int,
        "16",
        "N of the magnetisation estimate",
    ),
    def("covering.max_side", Kind::Int, "20", "largest box side"),
    def("covering.dims", Kind::IntList, "2,3", "dimensions"),
    def("pivotal.side", Kind::Int, "5", "side of the square grid"),
    def(
        "pivotal.configs",
        Kind::Unsigned,
        "1000",
        "random configurations",
    ),
    def("pivotal.p", Kind::Real, "0.6", "open probability"),
    def(
        "sampler.p",
        Kind::Real,
        "0.6",
        "edge probability on the unit square",
    ),
    def(
        "sampler.sweeps",
        Kind::Unsigned,
        "1000000",
        "recorded sweeps",
    ),
    def(
        "sampler.batches",
        Kind::Unsigned,
        "100",
        "batches for standard errors",
    ),
    def(
        "es.sides",
        Kind::IntList,
        "2,2",
        "sides of the enumerated box",
    ),
    def("es.coupling", Kind::Real, "1", "uniform coupling"),
    def("constants.k_max", Kind::Unsigned, "8", "largest K"),
    def("constants.grid", Kind::Unsigned, "1000", "grid points in p"),
];

fn schema(key: &str) -> Option<&'static KeyDef> {
    SCHEMA.iter().find(|d| d.key == key)
}

/// Shortest representation that reads back to the same `f64`.
pub fn canonical_real(x: f64) -> String {
    format!("{x:?}")
}

fn parse_real(field: &str, raw: &str) -> Result<f64, ConfigError> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_error(field, format!("expected a finite real, got `{raw}`")))
}

fn canonicalise(field: &str, kind: Kind, raw: &str) -> Result<String, ConfigError> {
    let raw = raw.trim();
    match kind {
        Kind::Int => raw
            .parse::<i64>()
            .map(|v| v.to_string())
            .map_err(|_| config_error(field, format!("expected an integer, got `{raw}`"))),
        Kind::Unsigned => raw.parse::<u64>().map(|v| v.to_string()).map_err(|_| {
            config_error(
                field,
                format!("expected a nonnegative integer, got `{raw}`"),
            )
        }),
        Kind::Real => parse_real(field, raw).map(canonical_real),
        Kind::RealOrAuto if raw.eq_ignore_ascii_case("auto") => Ok("auto".into()),
        Kind::RealOrAuto => parse_real(field, raw).map(canonical_real),
        Kind::Bool => match raw.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok("true".into()),
            "false" | "no" | "0" => Ok("false".into()),
            _ => Err(config_error(
                field,
                format!("expected true or false, got `{raw}`"),
            )),
        },
        Kind::IntList => raw
            .split(',')
            .map(|s| {
                s.trim().parse::<i64>().map(|v| v.to_string()).map_err(|_| {
                    config_error(
                        field,
                        format!("expected integers separated by commas, got `{raw}`"),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.join(",")),
        Kind::RealList => raw
            .split(',')
            .map(|s| parse_real(field, s).map(canonical_real))
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.join(",")),
        Kind::Choice(options) => {
            let v = raw.to_ascii_lowercase();
            if options.contains(&v.as_str()) {
                Ok(v)
            } else {
                Err(config_error(
                    field,
                    format!("expected one of {}, got `{raw}`", options.join(", ")),
                ))
            }
        }
        Kind::Disorder => parse_disorder(field, raw).map(|d| d.canonical()),
    }
}

/// Parsed form of a `model.disorder` value.
#[derive(Clone, Debug, PartialEq)]
pub enum DisorderSpec {
    Bernoulli(f64),
    Dirac(f64),
    Uniform(f64, f64),
    Atoms(Vec<(f64, f64)>),
}

impl DisorderSpec {
    pub fn canonical(&self) -> String {
        match self {
            DisorderSpec::Bernoulli(l) => format!("bernoulli:{}", canonical_real(*l)),
            DisorderSpec::Dirac(v) => format!("dirac:{}", canonical_real(*v)),
            DisorderSpec::Uniform(a, b) => {
                format!("uniform:{}:{}", canonical_real(*a), canonical_real(*b))
            }
            DisorderSpec::Atoms(a) => format!(
                "atoms:{}",
                a.iter()
                    .map(|(v, w)| format!("{}@{}", canonical_real(*v), canonical_real(*w)))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }

    pub fn law(&self) -> fk_core::Result<fk_core::fk::DisorderLaw> {
        use fk_core::fk::DisorderLaw;
        match self {
            DisorderSpec::Bernoulli(l) => DisorderLaw::bernoulli(*l),
            DisorderSpec::Dirac(v) => DisorderLaw::dirac(*v),
            DisorderSpec::Uniform(a, b) => DisorderLaw::uniform(*a, *b),
            DisorderSpec::Atoms(a) => DisorderLaw::atoms(a),
        }
    }
}

pub fn parse_disorder(field: &str, raw: &str) -> Result<DisorderSpec, ConfigError> {
    let bad = || {
        config_error(
            field,
            format!("expected bernoulli:λ, dirac:v, uniform:a:b or atoms:v@w,…, got `{raw}`"),
        )
    };
    let (name, rest) = raw.split_once(':').ok_or_else(bad)?;
    let spec = match name.trim().to_ascii_lowercase().as_str() {
        "bernoulli" => DisorderSpec::Bernoulli(parse_real(field, rest)?),
        "dirac" => DisorderSpec::Dirac(parse_real(field, rest)?),
        "uniform" => {
            let (a, b) = rest.split_once(':').ok_or_else(bad)?;
            DisorderSpec::Uniform(parse_real(field, a)?, parse_real(field, b)?)
        }
        "atoms" => DisorderSpec::Atoms(
            rest.split(',')
                .map(|atom| {
                    let (v, w) = atom.split_once('@').ok_or_else(bad)?;
                    Ok((parse_real(field, v)?, parse_real(field, w)?))
                })
                .collect::<Result<Vec<_>, ConfigError>>()?,
        ),
        _ => return Err(bad()),
    };
    spec.law().map_err(|e| config_error(field, e.to_string()))?;
    Ok(spec)
}

/// Raw `key -> value` pairs from the text format; later lines win.
pub fn parse_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            config_error(
                format!("line {}", no + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let k = k.trim();
        let key = if section.is_empty() || k.contains('.') {
            k.to_string()
        } else {
            format!("{section}.{k}")
        };
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// A validated configuration for one experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Validates raw values; `seed` may also be given as a key.
    pub fn build(
        experiment: Experiment,
        raw: &BTreeMap<String, String>,
        overrides: &[(String, String)],
        seed: Option<u64>,
    ) -> Result<Self, ConfigError> {
        let mut merged = raw.clone();
        for (k, v) in overrides {
            merged.insert(k.trim().to_string(), v.clone());
        }
        let mut file_seed = None;
        let mut values = BTreeMap::new();
        for (k, v) in &merged {
            match k.as_str() {
                "seed" => {
                    file_seed =
                        Some(v.trim().parse::<u64>().map_err(|_| {
                            config_error("seed", format!("expected a u64, got `{v}`"))
                        })?)
                }
                "experiment" => {
                    if v.trim() != experiment.name() {
                        return Err(config_error(
                            "experiment",
                            format!(
                                "file names `{}` but `{}` was requested",
                                v.trim(),
                                experiment.name()
                            ),
                        ));
                    }
                }
                _ => {
                    let d = schema(k).ok_or_else(|| config_error(k.as_str(), "unknown key"))?;
                    values.insert(k.clone(), canonicalise(k, d.kind, v)?);
                }
            }
        }
        for d in SCHEMA {
            if !values.contains_key(d.key) {
                values.insert(
                    d.key.to_string(),
                    canonicalise(d.key, d.kind, d.default).expect("defaults are valid"),
                );
            }
        }
        let cfg = ExperimentConfig {
            experiment,
            seed: seed.or(file_seed).unwrap_or(0),
            values,
        };
        experiment.validate(&cfg)?;
        Ok(cfg)
    }

    pub fn from_text(
        experiment: Experiment,
        text: &str,
        overrides: &[(String, String)],
        seed: Option<u64>,
    ) -> Result<Self, ConfigError> {
        Self::build(experiment, &parse_text(text)?, overrides, seed)
    }

    pub fn defaults(experiment: Experiment) -> Self {
        Self::build(experiment, &BTreeMap::new(), &[], None).expect("defaults validate")
    }

    pub fn with(&self, key: &str, value: &str) -> Result<Self, ConfigError> {
        let mut raw = self.values.clone();
        raw.insert(key.to_string(), value.to_string());
        Self::build(self.experiment, &raw, &[], Some(self.seed))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("key {key} not in schema"))
    }

    pub fn int(&self, key: &str) -> i64 {
        self.raw(key).parse().expect("validated integer")
    }

    pub fn i32(&self, key: &str) -> Result<i32, ConfigError> {
        i32::try_from(self.int(key)).map_err(|_| config_error(key, "out of range"))
    }

    pub fn unsigned(&self, key: &str) -> u64 {
        self.raw(key).parse().expect("validated integer")
    }

    pub fn real(&self, key: &str) -> f64 {
        self.raw(key).parse().expect("validated real")
    }

    pub fn real_or_auto(&self, key: &str) -> Option<f64> {
        match self.raw(key) {
            "auto" => None,
            v => Some(v.parse().expect("validated real")),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        self.raw(key) == "true"
    }

    pub fn ints(&self, key: &str) -> Vec<i64> {
        self.raw(key)
            .split(',')
            .map(|s| s.parse().expect("validated list"))
            .collect()
    }

    pub fn reals(&self, key: &str) -> Vec<f64> {
        self.raw(key)
            .split(',')
            .map(|s| s.parse().expect("validated list"))
            .collect()
    }

    pub fn disorder(&self) -> DisorderSpec {
        parse_disorder("model.disorder", self.raw("model.disorder")).expect("validated law")
    }

    /// Keys that influence the results of this experiment.
    pub fn relevant(&self) -> BTreeMap<&str, &str> {
        let interaction = self.raw("model.interaction");
        self.values
            .iter()
            .filter(|(k, _)| self.experiment.uses(k, interaction))
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }

    /// Line-oriented text hashed into the configuration hash.
    pub fn canonical(&self) -> String {
        let mut s = format!(
            "experiment={}\nseed={}\n",
            self.experiment.name(),
            self.seed
        );
        for (k, v) in self.relevant() {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }

    /// SHA-256 of [`canonical`](Self::canonical), hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_overrides() {
        let text = "seed = 3\n[lattice]\nn = 40 # comment\n[model]\nbeta=0.50\n";
        let over = vec![("lattice.n".to_string(), "48".to_string())];
        let c = ExperimentConfig::from_text(Experiment::Theta, text, &over, None).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.int("lattice.n"), 48);
        assert_eq!(c.raw("model.beta"), "0.5");
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let e = ExperimentConfig::from_text(Experiment::Theta, "[lattice]\nside = 3\n", &[], None)
            .unwrap_err();
        assert_eq!(e.field, "lattice.side");
        let e = ExperimentConfig::from_text(Experiment::Theta, "model.beta = hot\n", &[], None)
            .unwrap_err();
        assert_eq!(e.field, "model.beta");
        let e = ExperimentConfig::from_text(
            Experiment::Theta,
            "model.disorder = bernoulli:1.5\n",
            &[],
            None,
        )
        .unwrap_err();
        assert_eq!(e.field, "model.disorder");
    }

    #[test]
    fn hash_tracks_relevant_fields_only() {
        let a = ExperimentConfig::defaults(Experiment::DlrFailure);
        let same = a.with("dlr.lambda", "0.50").unwrap();
        assert_eq!(a.hash(), same.hash());
        let irrelevant = a.with("lattice.n", "64").unwrap();
        assert_eq!(a.hash(), irrelevant.hash());
        let changed = a.with("dlr.lambda", "0.4").unwrap();
        assert_ne!(a.hash(), changed.hash());
        let reseeded =
            ExperimentConfig::build(Experiment::DlrFailure, &BTreeMap::new(), &[], Some(9))
                .unwrap();
        assert_ne!(a.hash(), reseeded.hash());
    }

    #[test]
    fn disorder_round_trip() {
        let d = parse_disorder("x", "atoms:0@0.3, 0.5@0.2,1@0.5").unwrap();
        assert_eq!(d.canonical(), "atoms:0.0@0.3,0.5@0.2,1.0@0.5");
        assert_eq!(parse_disorder("x", &d.canonical()).unwrap(), d);
    }
}
