use fk_core::cluster::oracle::audit_pivotal;
use fk_core::fk::{bell_number, exact_from_probs, set_partitions, BoundaryPartition};
use fk_core::ising::legendre_lambda_star;
use fk_core::lattice::{Covering, EdgeSet, Graph, LatticeBox};
use fk_core::sampler::{detailed_balance_residual, heat_bath_kernels};
use fk_core::verify::{
    averaged_conditional, dlr_conditional_formula, is_up_set, lss_threshold, r_lss, r_prime,
    up_sets,
};
use proptest::prelude::*;

/// A sub-graph of the free edges of the 3x3 box, at most `max` edges.
fn small_graph(mask: u32, max: usize) -> Option<Graph> {
    let bx = LatticeBox::from_ranges(&[(1, 3), (1, 3)]).unwrap();
    let all = EdgeSet::free(&bx);
    let mut k = 0;
    let edges = all.filter(|_| {
        let keep = mask >> k & 1 == 1;
        k += 1;
        keep
    });
    (!edges.is_empty() && edges.len() <= max).then(|| Graph::new(&edges))
}

fn random_partition(n: usize, seed: u64) -> BoundaryPartition {
    let labels: Vec<u32> = (0..n).map(|i| ((seed >> (2 * i)) & 3) as u32).collect();
    BoundaryPartition::from_labels(&labels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fk_tables_normalised_and_wired_dominates_free(mask in 1u32..4096, p in 0.05f64..0.95, q in 1.0f64..4.0) {
        let Some(g) = small_graph(mask, 7) else { return Ok(()) };
        let m = g.num_edges();
        let n = g.boundary_span().len();
        let probs = vec![p; m];
        let free = exact_from_probs(&g, &probs, q, &BoundaryPartition::free(n)).unwrap();
        let wired = exact_from_probs(&g, &probs, q, &BoundaryPartition::wired(n)).unwrap();
        prop_assert!((free.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for e in 0..m {
            prop_assert!(wired.marginal(e) >= free.marginal(e) - 1e-12);
        }
    }

    #[test]
    fn percolation_is_a_product_measure(mask in 1u32..4096, p in 0.05f64..0.95, seed in any::<u64>()) {
        let Some(g) = small_graph(mask, 7) else { return Ok(()) };
        let n = g.boundary_span().len();
        let t = exact_from_probs(&g, &vec![p; g.num_edges()], 1.0, &random_partition(n, seed)).unwrap();
        for e in 0..g.num_edges() {
            prop_assert!((t.marginal(e) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_bath_is_reversible(mask in 1u32..4096, p in 0.05f64..0.95, q in 1.0f64..4.0, seed in any::<u64>()) {
        let Some(g) = small_graph(mask, 6) else { return Ok(()) };
        let n = g.boundary_span().len();
        let pi = random_partition(n, seed);
        let probs = vec![p; g.num_edges()];
        let t = exact_from_probs(&g, &probs, q, &pi).unwrap();
        let k = heat_bath_kernels(&g, &probs, q, &pi).unwrap();
        prop_assert!(detailed_balance_residual(&k, t.probs()) < 1e-12);
    }

    #[test]
    fn pivotal_routines_match_oracles(bits in any::<u64>(), x in 0u32..16, y in 0u32..16) {
        let bx = LatticeBox::from_ranges(&[(1, 4), (1, 4)]).unwrap();
        let g = Graph::new(&EdgeSet::free(&bx));
        let omega: Vec<bool> = (0..g.num_edges()).map(|e| bits >> e & 1 == 1).collect();
        prop_assume!(x != y);
        prop_assert_eq!(audit_pivotal(&g, &omega, x, y).unwrap(), Vec::<String>::new());
    }

    #[test]
    fn coverings_pass_their_audit(a in 1i32..12, b in 1i32..12, l in 1i32..12, lp in 0i32..6) {
        let bx = LatticeBox::from_ranges(&[(3, a + 2), (-1, b - 2)]).unwrap();
        prop_assume!(lp <= l && l + 2 * lp <= a.min(b));
        let audit = Covering::new(&bx, l, lp).unwrap().audit();
        prop_assert!(audit.passed(), "{:?}", audit.failures);
    }

    #[test]
    fn dlr_closed_form(lambda in 0.01f64..0.99, p in 0.01f64..0.99, q in 1.0f64..8.0) {
        let exact = averaged_conditional(lambda, p, q).unwrap();
        prop_assert!((exact - dlr_conditional_formula(lambda, p, q)).abs() < 1e-12);
        prop_assert!(exact >= lambda * p - 1e-12);
    }

    #[test]
    fn renormalisation_constants(k in 2u32..9, t in 0.0f64..1.0, s in 0.0f64..1.0) {
        let thr = lss_threshold(k);
        let (a, b) = (thr + (1.0 - thr) * t.min(s), thr + (1.0 - thr) * t.max(s));
        prop_assert!(r_lss(k, a).unwrap() <= r_lss(k, b).unwrap());
        let pthr = 1.0 - (1.0 - thr).powi(2);
        let p = pthr + (1.0 - pthr) * t;
        prop_assert!(r_prime(k, p).unwrap() <= r_lss(k, p).unwrap() + 1e-15);
    }

    #[test]
    fn legendre_transform_bounds(x in -0.999f64..0.999) {
        let v = legendre_lambda_star(x).unwrap();
        prop_assert!((v - legendre_lambda_star(-x).unwrap()).abs() < 1e-15);
        prop_assert!(v >= x * x / 2.0 - 1e-15);
    }
}

#[test]
fn partitions_are_counted_by_bell_numbers() {
    for n in 0..7 {
        assert_eq!(set_partitions(n).count() as u64, bell_number(n));
        assert!(set_partitions(n).all(|p| p.refines(&BoundaryPartition::wired(n))));
    }
}

#[test]
fn up_sets_are_up_sets() {
    let counts = [2usize, 3, 6, 20, 168];
    for (m, &c) in counts.iter().enumerate() {
        let ups = up_sets(m).unwrap();
        assert_eq!(ups.len(), c);
        assert!(ups.iter().all(|&s| is_up_set(m, s as u64)));
    }
}
