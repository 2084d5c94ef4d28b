use std::sync::Arc;

use crate::{Error, Result};

/// Largest edge count for which up-sets are listed explicitly.
pub const MAX_UPSET_EDGES: usize = 5;

/// Every up-set of `{0,1}^m`, as a bitset over configuration masks.
///
/// An up-set on `m` edges splits into its restrictions `a ⊆ b` to the
/// half-cubes `ω_{m-1} = 0` and `ω_{m-1} = 1`, both up-sets on `m - 1` edges.
pub fn up_sets(m: usize) -> Result<Vec<u32>> {
    if m > MAX_UPSET_EDGES {
        return Err(Error::TooLarge {
            what: "edges for up-set enumeration",
            size: m as u64,
            limit: MAX_UPSET_EDGES as u64,
        });
    }
    let mut sets: Vec<u32> = vec![0, 1];
    for k in 0..m {
        let half = 1u32 << k;
        let mut next = Vec::new();
        for &a in &sets {
            for &b in &sets {
                if a & !b == 0 {
                    next.push(a | b << half);
                }
            }
        }
        sets = next;
    }
    sets.sort_unstable();
    Ok(sets)
}

/// Whether a bitset over configuration masks is an up-set.
pub fn is_up_set(m: usize, set: u64) -> bool {
    (0..1u64 << m).all(|x| set >> x & 1 == 0 || (0..m).all(|e| set >> (x | 1 << e) & 1 == 1))
}

/// Measure of configuration sets for `m <= 5`, by byte lookup.
pub struct SetMeasure {
    tables: Vec<[f64; 256]>,
}

impl SetMeasure {
    pub fn new(probs: &[f64]) -> Result<Self> {
        if probs.len() > 1 << MAX_UPSET_EDGES {
            return Err(Error::TooLarge {
                what: "configurations for set measure",
                size: probs.len() as u64,
                limit: 1 << MAX_UPSET_EDGES,
            });
        }
        let bytes = probs.len().div_ceil(8).max(1);
        let mut tables = vec![[0.0; 256]; bytes];
        for (k, t) in tables.iter_mut().enumerate() {
            for (byte, slot) in t.iter_mut().enumerate() {
                *slot = (0..8)
                    .filter(|b| byte >> b & 1 == 1)
                    .filter_map(|b| probs.get(8 * k + b))
                    .sum();
            }
        }
        Ok(SetMeasure { tables })
    }

    #[inline]
    pub fn measure(&self, set: u32) -> f64 {
        self.tables
            .iter()
            .enumerate()
            .map(|(k, t)| t[(set >> (8 * k) & 0xff) as usize])
            .sum()
    }
}

/// `min_{A,B} μ(A∩B) - μ(A)μ(B)` over all pairs of up-sets.
pub fn fkg_pairs_margin(probs: &[f64], ups: &[u32]) -> Result<f64> {
    let mu = SetMeasure::new(probs)?;
    let single: Vec<f64> = ups.iter().map(|&a| mu.measure(a)).collect();
    let mut worst = f64::INFINITY;
    for (i, &a) in ups.iter().enumerate() {
        for (j, &b) in ups.iter().enumerate().skip(i) {
            worst = worst.min(mu.measure(a & b) - single[i] * single[j]);
        }
    }
    Ok(worst)
}

/// `min_A ν(A) - μ(A)` over all up-sets.
pub fn domination_margin(mu: &[f64], nu: &[f64], ups: &[u32]) -> Result<f64> {
    let (a, b) = (SetMeasure::new(mu)?, SetMeasure::new(nu)?);
    Ok(ups
        .iter()
        .map(|&s| b.measure(s) - a.measure(s))
        .fold(f64::INFINITY, f64::min))
}

/// `min μ(x∨y) μ(x∧y) - μ(x) μ(y)`; nonnegative means the lattice condition holds.
pub fn lattice_condition_margin(mu: &[f64]) -> f64 {
    holley_margin(mu, mu)
}

/// `min ν(x∨y) μ(x∧y) - ν(x) μ(y)`; nonnegative certifies `μ ≤ ν`.
pub fn holley_margin(mu: &[f64], nu: &[f64]) -> f64 {
    let n = mu.len();
    let mut worst = f64::INFINITY;
    for x in 0..n {
        for y in 0..n {
            worst = worst.min(nu[x | y] * mu[x & y] - nu[x] * mu[y]);
        }
    }
    worst
}

/// Product Bernoulli law as a table over masks.
pub fn product_table(probs: &[f64]) -> Vec<f64> {
    (0..1usize << probs.len())
        .map(|x| {
            probs
                .iter()
                .enumerate()
                .map(|(e, &p)| if x >> e & 1 == 1 { p } else { 1.0 - p })
                .product()
        })
        .collect()
}

type Indicator = Arc<dyn Fn(&[bool]) -> bool + Send + Sync>;

#[derive(Clone)]
enum EventKind {
    /// Minimal elements, as lists of edges that must all be open.
    UpSet(Vec<Vec<u32>>),
    Increasing(Indicator),
    Unchecked(Indicator),
}

/// A named event on bond configurations.
#[derive(Clone)]
pub struct MonotoneEvent {
    pub name: String,
    kind: EventKind,
}

impl std::fmt::Debug for MonotoneEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            EventKind::UpSet(g) => format!("up-set with {} generators", g.len()),
            EventKind::Increasing(_) => "increasing".into(),
            EventKind::Unchecked(_) => "unchecked".into(),
        };
        write!(f, "{} ({kind})", self.name)
    }
}

impl MonotoneEvent {
    /// The up-set generated by the given minimal elements.
    pub fn up_set(name: impl Into<String>, generators: Vec<Vec<u32>>) -> Self {
        MonotoneEvent {
            name: name.into(),
            kind: EventKind::UpSet(generators),
        }
    }

    /// An event the caller asserts to be increasing, such as a connection event.
    pub fn increasing(
        name: impl Into<String>,
        f: impl Fn(&[bool]) -> bool + Send + Sync + 'static,
    ) -> Self {
        MonotoneEvent {
            name: name.into(),
            kind: EventKind::Increasing(Arc::new(f)),
        }
    }

    /// An event with no monotonicity claim; domination tests refuse it.
    pub fn unchecked(
        name: impl Into<String>,
        f: impl Fn(&[bool]) -> bool + Send + Sync + 'static,
    ) -> Self {
        MonotoneEvent {
            name: name.into(),
            kind: EventKind::Unchecked(Arc::new(f)),
        }
    }

    pub fn is_increasing(&self) -> bool {
        !matches!(self.kind, EventKind::Unchecked(_))
    }

    pub fn holds(&self, omega: &[bool]) -> bool {
        match &self.kind {
            EventKind::UpSet(gens) => gens.iter().any(|g| {
                g.iter()
                    .all(|&e| omega.get(e as usize).copied().unwrap_or(false))
            }),
            EventKind::Increasing(f) | EventKind::Unchecked(f) => f(omega),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind_counts() {
        let counts: Vec<usize> = (0..=5).map(|m| up_sets(m).unwrap().len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168, 7581]);
        assert!(up_sets(6).is_err());
    }

    #[test]
    fn enumerated_sets_are_up_sets() {
        for m in 0..=4 {
            for s in up_sets(m).unwrap() {
                assert!(is_up_set(m, s as u64));
            }
        }
        // brute force over all subsets of {0,1}^3
        let brute = (0..1u64 << 8).filter(|&s| is_up_set(3, s)).count();
        assert_eq!(brute, 20);
    }

    #[test]
    fn set_measure_matches_sum() {
        let probs: Vec<f64> = (0..32).map(|i| (i as f64 + 1.0) / 528.0).collect();
        let mu = SetMeasure::new(&probs).unwrap();
        for set in [0u32, 1, 0xdead_beef, u32::MAX, 0x8000_0001] {
            let direct: f64 = (0..32)
                .filter(|b| set >> b & 1 == 1)
                .map(|b| probs[b])
                .sum();
            assert!((mu.measure(set) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn harris_for_products() {
        let t = product_table(&[0.3, 0.6, 0.8]);
        let ups = up_sets(3).unwrap();
        assert!(fkg_pairs_margin(&t, &ups).unwrap() > -1e-15);
        assert!(lattice_condition_margin(&t) > -1e-15);
        let s = product_table(&[0.4, 0.6, 0.8]);
        assert!(domination_margin(&t, &s, &ups).unwrap() > -1e-15);
        assert!(domination_margin(&s, &t, &ups).unwrap() < -0.05);
        assert!(holley_margin(&t, &s) > -1e-15);
    }

    #[test]
    fn event_kinds() {
        let a = MonotoneEvent::up_set("e0 and e1, or e2", vec![vec![0, 1], vec![2]]);
        assert!(
            a.holds(&[true, true, false])
                && a.holds(&[false, false, true])
                && !a.holds(&[true, false, false])
        );
        assert!(a.is_increasing());
        assert!(!MonotoneEvent::unchecked("closed", |w| !w[0]).is_increasing());
    }
}
