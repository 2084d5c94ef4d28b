use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::{error::invalid, Result};

/// Map from a coupling `J >= 0` to an edge-opening probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Interaction {
    /// `p(J) = slope * min(J, 1)`.
    Linear { slope: f64 },
    /// `p(J) = 1 - exp(-βJ)`, the Potts convention.
    Potts { beta: f64 },
    /// `p(J) = 1 - exp(-2βJ)`, the Ising convention.
    Ising { beta: f64 },
}

impl Interaction {
    #[inline]
    pub fn prob(&self, j: f64) -> f64 {
        match *self {
            Interaction::Linear { slope } => slope * j.min(1.0),
            Interaction::Potts { beta } => -(-beta * j).exp_m1(),
            Interaction::Ising { beta } => -(-2.0 * beta * j).exp_m1(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Interaction::Linear { slope } if !(0.0..=1.0).contains(&slope) => Err(invalid(
                "interaction",
                format!("slope {slope} not in [0, 1]"),
            )),
            Interaction::Potts { beta } | Interaction::Ising { beta }
                if !(beta >= 0.0 && beta.is_finite()) =>
            {
                Err(invalid(
                    "interaction",
                    format!("beta {beta} must be finite and >= 0"),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Cluster weight `q` together with the coupling map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FkParams {
    pub q: f64,
    pub interaction: Interaction,
}

impl FkParams {
    pub fn new(q: f64, interaction: Interaction) -> Result<Self> {
        let p = FkParams { q, interaction };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(invalid("q", format!("need q >= 1, got {}", self.q)));
        }
        self.interaction.validate()
    }

    /// `p(J_e)` for every edge.
    pub fn probs(&self, media: &[f64]) -> Vec<f64> {
        media.iter().map(|&j| self.interaction.prob(j)).collect()
    }

    /// Integer `q`, when it is one.
    pub fn integer_q(&self) -> Option<u32> {
        (self.q.fract() == 0.0 && self.q <= u32::MAX as f64).then_some(self.q as u32)
    }
}

/// Single-edge open probability under free boundary conditions.
#[inline]
pub fn p_tilde(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p / (p + q * (1.0 - p))
    }
}

/// One atom `weight · δ_value` of a discrete law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

/// Law `ρ` of the i.i.d. couplings, supported in `[0, 1]`.
#[derive(Clone)]
pub enum DisorderLaw {
    Atoms(Vec<Atom>),
    /// Given by its quantile function `u ↦ F^{-1}(u)`.
    Quantile {
        name: String,
        quantile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl DisorderLaw {
    /// Atoms are sorted by value; duplicate values are merged.
    pub fn atoms(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(invalid("disorder", "no atoms"));
        }
        let mut atoms: Vec<Atom> = Vec::new();
        for &(value, weight) in pairs {
            if !(0.0..=1.0).contains(&value) {
                return Err(invalid("disorder", format!("atom {value} outside [0, 1]")));
            }
            if !(weight >= 0.0) {
                return Err(invalid("disorder", format!("negative weight {weight}")));
            }
            atoms.push(Atom { value, weight });
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid("disorder", format!("weights sum to {total}")));
        }
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut merged: Vec<Atom> = Vec::new();
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.value == a.value => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        merged.retain(|a| a.weight > 0.0);
        Ok(DisorderLaw::Atoms(merged))
    }

    /// `λδ_1 + (1-λ)δ_0`.
    pub fn bernoulli(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(invalid("lambda", format!("{lambda} not in [0, 1]")));
        }
        Self::atoms(&[(0.0, 1.0 - lambda), (1.0, lambda)])
    }

    pub fn dirac(value: f64) -> Result<Self> {
        Self::atoms(&[(value, 1.0)])
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(invalid(
                "disorder",
                format!("uniform({a}, {b}) not inside [0, 1]"),
            ));
        }
        Ok(DisorderLaw::Quantile {
            name: format!("uniform({a},{b})"),
            quantile: Arc::new(move |u| a + (b - a) * u),
        })
    }

    pub fn atom_list(&self) -> Option<&[Atom]> {
        match self {
            DisorderLaw::Atoms(a) => Some(a),
            DisorderLaw::Quantile { .. } => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match self {
            DisorderLaw::Atoms(atoms) => {
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.weight;
                    if u < acc {
                        return a.value;
                    }
                }
                atoms.last().map(|a| a.value).unwrap_or(0.0)
            }
            DisorderLaw::Quantile { quantile, .. } => quantile(u).clamp(0.0, 1.0),
        }
    }

    pub fn sample_media<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

impl fmt::Debug for DisorderLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisorderLaw::Atoms(a) => f.debug_tuple("Atoms").field(a).finish(),
            DisorderLaw::Quantile { name, .. } => write!(f, "Quantile({name})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probabilities() {
        assert_eq!(Interaction::Linear { slope: 0.5 }.prob(1.0), 0.5);
        let p = Interaction::Ising { beta: 1.0 }.prob(1.0);
        assert!((p - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!((p_tilde(0.5, 2.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p_tilde(1.0, 7.0), 1.0);
    }

    #[test]
    fn atoms_normalised_and_sorted() {
        let law = DisorderLaw::atoms(&[(1.0, 0.5), (0.0, 0.3), (0.5, 0.2)]).unwrap();
        let a = law.atom_list().unwrap();
        assert_eq!(
            a.iter().map(|x| x.value).collect::<Vec<_>>(),
            vec![0.0, 0.5, 1.0]
        );
        assert!(DisorderLaw::atoms(&[(0.2, 0.5)]).is_err());
        assert!(DisorderLaw::atoms(&[(1.2, 1.0)]).is_err());
    }

    #[test]
    fn bernoulli_frequency() {
        let law = DisorderLaw::bernoulli(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let ones = (0..n).filter(|_| law.sample(&mut rng) == 1.0).count();
        assert!((ones as f64 / n as f64 - 0.3).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_q() {
        assert!(FkParams::new(0.5, Interaction::Linear { slope: 0.5 }).is_err());
        assert!(FkParams::new(2.0, Interaction::Linear { slope: 1.5 }).is_err());
    }
}
