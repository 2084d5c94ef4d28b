use std::collections::VecDeque;

use crate::lattice::Graph;
use crate::{Error, Result};

/// DFS tree of the open cluster of a root, with its bridges.
struct BridgeTree {
    /// Edge to the DFS parent, `u32::MAX` for the root and unreached vertices.
    parent_edge: Vec<u32>,
    reached: Vec<bool>,
    bridge: Vec<bool>,
}

fn bridge_tree(graph: &Graph, omega: &[bool], root: u32) -> BridgeTree {
    let n = graph.num_vertices();
    let mut tin = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut parent_edge = vec![u32::MAX; n];
    let mut bridge = vec![false; graph.num_edges()];
    let mut timer = 0u32;
    let mut stack: Vec<(u32, usize)> = vec![(root, 0)];
    tin[root as usize] = timer;
    low[root as usize] = timer;
    timer += 1;
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        let nbrs = graph.neighbours(v);
        if *next < nbrs.len() {
            let (w, e) = nbrs[*next];
            *next += 1;
            if !omega[e as usize] || e == parent_edge[v as usize] {
                continue;
            }
            if tin[w as usize] == u32::MAX {
                tin[w as usize] = timer;
                low[w as usize] = timer;
                timer += 1;
                parent_edge[w as usize] = e;
                stack.push((w, 0));
            } else {
                low[v as usize] = low[v as usize].min(tin[w as usize]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                low[p as usize] = low[p as usize].min(low[v as usize]);
                if low[v as usize] > tin[p as usize] {
                    bridge[parent_edge[v as usize] as usize] = true;
                }
            }
        }
    }
    BridgeTree {
        reached: tin.iter().map(|&t| t != u32::MAX).collect(),
        parent_edge,
        bridge,
    }
}

fn c2_from_tree(graph: &Graph, omega: &[bool], x: u32, tree: &BridgeTree) -> Vec<u32> {
    let mut seen = vec![false; graph.num_vertices()];
    seen[x as usize] = true;
    let mut queue = VecDeque::from([x]);
    let mut out = Vec::new();
    while let Some(v) = queue.pop_front() {
        out.push(v);
        for &(w, e) in graph.neighbours(v) {
            if omega[e as usize] && !tree.bridge[e as usize] && !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `C²_x`: vertices joined to `x` by two edge-disjoint open paths, with `x`.
pub fn doubly_connected_set(graph: &Graph, omega: &[bool], x: u32) -> Vec<u32> {
    let tree = bridge_tree(graph, omega, x);
    c2_from_tree(graph, omega, x, &tree)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotalReport {
    pub source: u32,
    pub target: u32,
    pub connected: bool,
    /// Open edges whose closure disconnects source from target, sorted.
    pub pivotal: Vec<u32>,
    /// The pivotal edge with an endpoint in `C²_source`, if any.
    pub first: Option<u32>,
}

/// Pivotal bonds from `x` to `y` and the first of them.
pub fn first_pivotal_bond(graph: &Graph, omega: &[bool], x: u32, y: u32) -> Result<PivotalReport> {
    let tree = bridge_tree(graph, omega, x);
    let connected = tree.reached[y as usize];
    let mut pivotal = Vec::new();
    if connected {
        let mut v = y;
        while v != x {
            let e = tree.parent_edge[v as usize];
            if tree.bridge[e as usize] {
                pivotal.push(e);
            }
            let (a, b) = graph.ends(e as usize);
            v = if a == v { b } else { a };
        }
    }
    pivotal.sort_unstable();
    let mut first = None;
    if !pivotal.is_empty() {
        let c2 = c2_from_tree(graph, omega, x, &tree);
        let mut in_c2 = vec![false; graph.num_vertices()];
        for &v in &c2 {
            in_c2[v as usize] = true;
        }
        let candidates: Vec<u32> = pivotal
            .iter()
            .copied()
            .filter(|&e| {
                let (a, b) = graph.ends(e as usize);
                in_c2[a as usize] || in_c2[b as usize]
            })
            .collect();
        if candidates.len() > 1 {
            return Err(Error::Invariant(format!(
                "{} pivotal bonds touch the doubly connected set",
                candidates.len()
            )));
        }
        first = candidates.first().copied();
    }
    Ok(PivotalReport {
        source: x,
        target: y,
        connected,
        pivotal,
        first,
    })
}

/// [`first_pivotal_bond`] on the edgewise maximum `ω ∨ ξ`.
pub fn first_pivotal_bond_overlay(
    graph: &Graph,
    omega: &[bool],
    xi: &[bool],
    x: u32,
    y: u32,
) -> Result<PivotalReport> {
    let joined: Vec<bool> = omega.iter().zip(xi).map(|(a, b)| *a || *b).collect();
    first_pivotal_bond(graph, &joined, x, y)
}
