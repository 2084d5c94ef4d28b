use std::collections::HashMap;

use super::point::Point;
use super::region::LatticeBox;
use crate::{error::invalid, Error, Result};

/// A nearest-neighbour edge `{a, b}` stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    a: Point,
    b: Point,
}

impl Edge {
    pub fn new(x: Point, y: Point) -> Result<Self> {
        if !x.is_adjacent(&y) {
            return Err(invalid(
                "edge",
                format!("{x} and {y} are not nearest neighbours"),
            ));
        }
        Ok(if x < y {
            Edge { a: x, b: y }
        } else {
            Edge { a: y, b: x }
        })
    }

    /// `{x, x + e_k}`.
    pub fn forward(x: Point, k: usize) -> Edge {
        Edge {
            a: x,
            b: x.offset(k, 1),
        }
    }

    pub fn endpoints(&self) -> (Point, Point) {
        (self.a, self.b)
    }

    pub fn a(&self) -> Point {
        self.a
    }

    pub fn b(&self) -> Point {
        self.b
    }

    pub fn axis(&self) -> usize {
        self.a
            .axis_to(&self.b)
            .expect("edge endpoints are adjacent")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Wired,
    Free,
    Explicit,
}

/// A finite sorted set of edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    edges: Vec<Edge>,
    kind: EdgeKind,
}

impl EdgeSet {
    /// `E^w(Λ)`: edges with at least one endpoint in `Λ`.
    pub fn wired(bx: &LatticeBox) -> EdgeSet {
        let mut edges = Vec::new();
        for x in bx.iter() {
            for k in 0..bx.dim() {
                edges.push(Edge::forward(x, k));
                let y = x.offset(k, -1);
                if !bx.contains(&y) {
                    edges.push(Edge::forward(y, k));
                }
            }
        }
        edges.sort();
        EdgeSet {
            edges,
            kind: EdgeKind::Wired,
        }
    }

    /// `E^f(Λ)`: edges with both endpoints in `Λ`.
    pub fn free(bx: &LatticeBox) -> EdgeSet {
        let mut edges = Vec::new();
        for x in bx.iter() {
            for k in 0..bx.dim() {
                let y = x.offset(k, 1);
                if bx.contains(&y) {
                    edges.push(Edge::forward(x, k));
                }
            }
        }
        edges.sort();
        EdgeSet {
            edges,
            kind: EdgeKind::Free,
        }
    }

    pub fn explicit(mut edges: Vec<Edge>) -> Result<EdgeSet> {
        if let Some(first) = edges.first() {
            let d = first.a.dim();
            if let Some(e) = edges.iter().find(|e| e.a.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: e.a.dim(),
                });
            }
        }
        edges.sort();
        edges.dedup();
        Ok(EdgeSet {
            edges,
            kind: EdgeKind::Explicit,
        })
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn iter(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn position(&self, e: &Edge) -> Option<usize> {
        self.edges.binary_search(e).ok()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.position(e).is_some()
    }

    /// Sorted vertex span.
    pub fn vertices(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self.edges.iter().flat_map(|e| [e.a, e.b]).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn filter(&self, mut keep: impl FnMut(&Edge) -> bool) -> EdgeSet {
        EdgeSet {
            edges: self.edges.iter().copied().filter(|e| keep(e)).collect(),
            kind: EdgeKind::Explicit,
        }
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        self.filter(|e| other.contains(e))
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.filter(|e| !other.contains(e))
    }
}

/// Index-based view of an edge set: vertices, endpoints and adjacency.
#[derive(Clone, Debug)]
pub struct Graph {
    dim: usize,
    edge_set: EdgeSet,
    vertices: Vec<Point>,
    index: HashMap<Point, u32>,
    ends: Vec<(u32, u32)>,
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
    boundary: Vec<bool>,
}

impl Graph {
    pub fn new(edge_set: &EdgeSet) -> Graph {
        let vertices = edge_set.vertices();
        let dim = vertices.first().map(|p| p.dim()).unwrap_or(1);
        let index: HashMap<Point, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, i as u32))
            .collect();
        let ends: Vec<(u32, u32)> = edge_set
            .edges
            .iter()
            .map(|e| (index[&e.a], index[&e.b]))
            .collect();
        let n = vertices.len();
        let mut deg = vec![0u32; n + 1];
        for &(u, v) in &ends {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut adj_start = vec![0u32; n + 1];
        for i in 0..n {
            adj_start[i + 1] = adj_start[i] + deg[i];
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![(0u32, 0u32); 2 * ends.len()];
        for (e, &(u, v)) in ends.iter().enumerate() {
            adj[fill[u as usize] as usize] = (v, e as u32);
            fill[u as usize] += 1;
            adj[fill[v as usize] as usize] = (u, e as u32);
            fill[v as usize] += 1;
        }
        let boundary = (0..n).map(|i| (deg[i] as usize) < 2 * dim).collect();
        Graph {
            dim,
            edge_set: edge_set.clone(),
            vertices,
            index,
            ends,
            adj_start,
            adj,
            boundary,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edge_set(&self) -> &EdgeSet {
        &self.edge_set
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: u32) -> Point {
        self.vertices[v as usize]
    }

    pub fn vertex_id(&self, p: &Point) -> Option<u32> {
        self.index.get(p).copied()
    }

    #[inline]
    pub fn ends(&self, e: usize) -> (u32, u32) {
        self.ends[e]
    }

    pub fn all_ends(&self) -> &[(u32, u32)] {
        &self.ends
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edge_set.edges[e]
    }

    pub fn edge_id(&self, x: &Point, y: &Point) -> Option<usize> {
        let e = Edge::new(*x, *y).ok()?;
        self.edge_set.position(&e)
    }

    /// `(neighbour, edge id)` pairs incident to `v`.
    #[inline]
    pub fn neighbours(&self, v: u32) -> &[(u32, u32)] {
        &self.adj[self.adj_start[v as usize] as usize..self.adj_start[v as usize + 1] as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbours(v).len()
    }

    /// Vertices whose lattice degree exceeds their degree in the edge set.
    pub fn is_boundary(&self, v: u32) -> bool {
        self.boundary[v as usize]
    }

    /// Sorted ids of the boundary span.
    pub fn boundary_span(&self) -> Vec<u32> {
        (0..self.vertices.len() as u32)
            .filter(|&v| self.boundary[v as usize])
            .collect()
    }

    /// Restriction to `sub`; edges of `sub` missing here map to `None`.
    pub fn subgraph(&self, sub: &EdgeSet) -> SubGraph {
        let parent_edges = sub
            .iter()
            .map(|e| self.edge_set.position(e).map(|i| i as u32))
            .collect();
        SubGraph {
            graph: Graph::new(sub),
            parent_edges,
        }
    }
}

/// A graph on a sub edge set, with the position of each edge in the parent.
#[derive(Clone, Debug)]
pub struct SubGraph {
    pub graph: Graph,
    pub parent_edges: Vec<Option<u32>>,
}

impl SubGraph {
    /// Restrict a parent configuration; edges outside the parent are closed.
    pub fn restrict(&self, parent: &[bool]) -> Vec<bool> {
        self.parent_edges
            .iter()
            .map(|e| e.map(|i| parent[i as usize]).unwrap_or(false))
            .collect()
    }

    pub fn restrict_values(&self, parent: &[f64]) -> Vec<f64> {
        self.parent_edges
            .iter()
            .map(|e| e.map(|i| parent[i as usize]).unwrap_or(0.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> LatticeBox {
        LatticeBox::from_ranges(&[(1, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn square_edge_counts() {
        let b = unit_square();
        assert_eq!(EdgeSet::free(&b).len(), 4);
        assert_eq!(EdgeSet::wired(&b).len(), 12);
    }

    #[test]
    fn wired_counts_general() {
        // |E^w| = d|Λ| + |∂Λ|/2 for boxes.
        for (d, n) in [(1, 5), (2, 4), (3, 3), (4, 3)] {
            let b = LatticeBox::lambda_n(d, n).unwrap();
            let w = EdgeSet::wired(&b);
            assert_eq!(
                w.len() as u64,
                d as u64 * b.len() + b.exterior_boundary().len() as u64 / 2
            );
            let g = Graph::new(&w);
            let span: Vec<Point> = g.boundary_span().iter().map(|&v| g.vertex(v)).collect();
            assert_eq!(span, b.exterior_boundary());
        }
    }

    #[test]
    fn free_span_boundary_is_box_surface() {
        let b = LatticeBox::lambda_n(2, 4).unwrap();
        let g = Graph::new(&EdgeSet::free(&b));
        // every vertex of a 3x3 box except the centre has degree < 4
        assert_eq!(g.boundary_span().len(), 8);
    }

    #[test]
    fn adjacency_consistent() {
        let g = Graph::new(&EdgeSet::wired(&unit_square()));
        for e in 0..g.num_edges() {
            let (u, v) = g.ends(e);
            assert!(g.neighbours(u).contains(&(v, e as u32)));
            assert!(g.neighbours(v).contains(&(u, e as u32)));
            assert_eq!(g.edge_id(&g.vertex(u), &g.vertex(v)), Some(e));
        }
    }

    #[test]
    fn subgraph_restriction() {
        let b = unit_square();
        let g = Graph::new(&EdgeSet::free(&b));
        let w = EdgeSet::wired(&b);
        let sub = g.subgraph(&w);
        let parent = vec![true; g.num_edges()];
        let r = sub.restrict(&parent);
        assert_eq!(r.iter().filter(|&&x| x).count(), 4);
    }

    #[test]
    fn edge_rejects_non_neighbours() {
        let a = Point::new(&[0, 0]).unwrap();
        assert!(Edge::new(a, Point::new(&[1, 1]).unwrap()).is_err());
        let e = Edge::new(a.offset(0, 1), a).unwrap();
        assert_eq!(e.a(), a);
    }
}
