use crate::lattice::{face_facets, Block, Facet, Graph, LatticeBox};

/// First facet on face `(axis, high)` of block `block` that lies outside `Λ`
/// or has every edge of `E^f(F)` open. Edges missing from `graph` are closed.
pub fn find_seed(
    graph: &Graph,
    omega: &[bool],
    lambda: &LatticeBox,
    block: &Block,
    axis: usize,
    high: bool,
    h: i32,
) -> Option<Facet> {
    face_facets(block, h, axis, high)
        .into_iter()
        .find(|f| is_seed(graph, omega, lambda, f))
}

fn is_seed(graph: &Graph, omega: &[bool], lambda: &LatticeBox, f: &Facet) -> bool {
    let region = f.region();
    if region.intersect(lambda).is_none() {
        return true;
    }
    f.edges()
        .iter()
        .all(|e| graph.edge_id(&e.a(), &e.b()).map_or(false, |id| omega[id]))
}
