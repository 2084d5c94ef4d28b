use crate::fk::{exact_averaged, p_tilde, BoundaryPartition, DisorderLaw, FkParams, Interaction};
use crate::lattice::{Edge, EdgeSet, Graph, Point};
use crate::{error::invalid, Result};

/// Outcome of the two-edge averaged DLR test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DlrFailure {
    /// `(𝔼Φ)(ω_e = 1 | ω_f = 1)`.
    pub conditional: f64,
    /// `sup_π 𝔼Φ^π_{{e}}(ω_e = 1) = λp`.
    pub unconditional_sup: f64,
    pub margin: f64,
}

/// The path `x - y - z` with `x` and `z` wired together, `e = xy`, `f = yz`.
fn two_edge_instance() -> Result<(Graph, BoundaryPartition)> {
    let x = Point::new(&[0, 0])?;
    let y = Point::new(&[1, 0])?;
    let z = Point::new(&[2, 0])?;
    let g = Graph::new(&EdgeSet::explicit(vec![
        Edge::new(x, y)?,
        Edge::new(y, z)?,
    ])?);
    let span = g.boundary_span();
    let pos = |p: &Point| {
        span.iter()
            .position(|&v| g.vertex(v) == *p)
            .expect("endpoint in span")
    };
    let mut labels: Vec<u32> = (0..span.len() as u32).collect();
    labels[pos(&z)] = labels[pos(&x)];
    Ok((g, BoundaryPartition::from_labels(&labels)))
}

/// `𝔼Φ(ω_e = 1 | ω_f = 1)` by exact averaging over `J ~ Bernoulli(λ)` with `p(J) = pJ`.
pub fn averaged_conditional(lambda: f64, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) || !(0.0..=1.0).contains(&p) {
        return Err(invalid("lambda, p", "must lie in [0, 1]"));
    }
    let (g, pi) = two_edge_instance()?;
    let e = g
        .edge_id(&Point::new(&[0, 0])?, &Point::new(&[1, 0])?)
        .expect("edge xy");
    let f = 1 - e;
    let law = DisorderLaw::bernoulli(lambda)?;
    let params = FkParams::new(q, Interaction::Linear { slope: p })?;
    let both = exact_averaged(&g, &law, &params, &pi, |_, m| (m >> e & m >> f & 1) as f64)?;
    let second = exact_averaged(&g, &law, &params, &pi, |_, m| (m >> f & 1) as f64)?;
    if second <= 0.0 {
        return Err(invalid(
            "lambda, p",
            "the conditioning event has probability zero",
        ));
    }
    Ok(both / second)
}

/// `λp / (λ + (1-λ) p̃/p̂)` with `p̂ = p / (1 + (1-p)²(q-1))`.
pub fn dlr_conditional_formula(lambda: f64, p: f64, q: f64) -> f64 {
    let tilde = p_tilde(p, q);
    let hat = p / (1.0 + (1.0 - p).powi(2) * (q - 1.0));
    lambda * p / (lambda + (1.0 - lambda) * tilde / hat)
}

/// The averaged conditional and its excess over `λp`; valid for `q >= 1`.
pub fn dlr_margin(lambda: f64, p: f64, q: f64) -> Result<DlrFailure> {
    if q < 1.0 {
        return Err(invalid("q", "need q >= 1"));
    }
    let conditional = averaged_conditional(lambda, p, q)?;
    let sup = lambda * p;
    Ok(DlrFailure {
        conditional,
        unconditional_sup: sup,
        margin: conditional - sup,
    })
}

/// Shows that conditioning on an open edge raises the averaged marginal of
/// its neighbour above every boundary condition.
pub fn demonstrate_dlr_failure(lambda: f64, p: f64, q: f64) -> Result<DlrFailure> {
    if q <= 1.0 {
        return Err(invalid(
            "q",
            "the averaged measure fails the DLR equation only for q > 1",
        ));
    }
    if !(lambda > 0.0 && lambda < 1.0 && p > 0.0 && p < 1.0) {
        return Err(invalid("lambda, p", "must lie in (0, 1)"));
    }
    let out = dlr_margin(lambda, p, q)?;
    if out.margin <= 0.0 {
        return Err(crate::Error::Invariant(format!(
            "no strict excess at λ = {lambda}, p = {p}, q = {q}: margin {}",
            out.margin
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_half_two() {
        let r = demonstrate_dlr_failure(0.5, 0.5, 2.0).unwrap();
        assert!((r.conditional - 3.0 / 11.0).abs() < 1e-14);
        assert!((r.unconditional_sup - 0.25).abs() < 1e-15);
        assert!((r.margin - 1.0 / 44.0).abs() < 1e-14);
    }

    #[test]
    fn formula_on_grid() {
        for i in 1..10 {
            for j in 1..10 {
                for q in [1.5, 2.0, 4.0] {
                    let (l, p) = (i as f64 / 10.0, j as f64 / 10.0);
                    let r = demonstrate_dlr_failure(l, p, q).unwrap();
                    assert!((r.conditional - dlr_conditional_formula(l, p, q)).abs() < 1e-12);
                    assert!(r.margin > 0.0);
                }
            }
        }
    }

    #[test]
    fn no_failure_at_q_one() {
        assert!(dlr_margin(0.3, 0.7, 1.0).unwrap().margin.abs() < 1e-14);
        assert!(demonstrate_dlr_failure(0.3, 0.7, 1.0).is_err());
    }
}
