//! Slow reference implementations used to audit the bridge-based routines.

use std::collections::VecDeque;

use super::pivotal::{doubly_connected_set, first_pivotal_bond};
use crate::lattice::Graph;
use crate::Result;

fn connected(graph: &Graph, omega: &[bool], x: u32, y: u32, skip: Option<usize>) -> bool {
    let mut seen = vec![false; graph.num_vertices()];
    seen[x as usize] = true;
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        if v == y {
            return true;
        }
        for &(w, e) in graph.neighbours(v) {
            if omega[e as usize] && Some(e as usize) != skip && !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Number of edge-disjoint open paths from `x` to `y`, capped at `cap`, by
/// augmenting paths with unit capacity in both directions of every open edge.
pub fn edge_disjoint_paths(graph: &Graph, omega: &[bool], x: u32, y: u32, cap: usize) -> usize {
    if x == y {
        return cap;
    }
    // flow[e] in {-1, 0, 1}: +1 means one unit from the first end to the second
    let mut flow = vec![0i8; graph.num_edges()];
    let mut total = 0;
    while total < cap {
        let mut prev: Vec<Option<(u32, u32)>> = vec![None; graph.num_vertices()];
        let mut seen = vec![false; graph.num_vertices()];
        seen[x as usize] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            if v == y {
                break;
            }
            for &(w, e) in graph.neighbours(v) {
                if !omega[e as usize] || seen[w as usize] {
                    continue;
                }
                let (a, _) = graph.ends(e as usize);
                let dir: i8 = if a == v { 1 } else { -1 };
                if flow[e as usize] * dir < 1 {
                    seen[w as usize] = true;
                    prev[w as usize] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        if !seen[y as usize] {
            break;
        }
        let mut v = y;
        while let Some((u, e)) = prev[v as usize] {
            let (a, _) = graph.ends(e as usize);
            flow[e as usize] += if a == u { 1 } else { -1 };
            v = u;
        }
        total += 1;
    }
    total
}

/// `C²_x` from two-path max-flow computations, one per vertex.
pub fn doubly_connected_by_flow(graph: &Graph, omega: &[bool], x: u32) -> Vec<u32> {
    (0..graph.num_vertices() as u32)
        .filter(|&y| edge_disjoint_paths(graph, omega, x, y, 2) >= 2)
        .collect()
}

/// Open edges whose removal disconnects `x` from `y`, found one edge at a time.
pub fn pivotal_by_removal(graph: &Graph, omega: &[bool], x: u32, y: u32) -> Vec<u32> {
    if !connected(graph, omega, x, y, None) {
        return Vec::new();
    }
    (0..graph.num_edges())
        .filter(|&e| omega[e] && !connected(graph, omega, x, y, Some(e)))
        .map(|e| e as u32)
        .collect()
}

/// Disagreements between the fast routines and the oracles on one instance.
pub fn audit_pivotal(graph: &Graph, omega: &[bool], x: u32, y: u32) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let c2 = doubly_connected_set(graph, omega, x);
    if c2 != doubly_connected_by_flow(graph, omega, x) {
        out.push("doubly connected set differs from the max-flow oracle".to_string());
    }
    let report = first_pivotal_bond(graph, omega, x, y)?;
    if report.pivotal != pivotal_by_removal(graph, omega, x, y) {
        out.push("pivotal bonds differ from the edge-removal oracle".to_string());
    }
    match report.first {
        Some(e) => {
            let (a, b) = graph.ends(e as usize);
            if c2.binary_search(&a).is_err() && c2.binary_search(&b).is_err() {
                out.push(format!("first pivotal bond {e} does not touch C²_x"));
            }
        }
        None if !report.pivotal.is_empty() => {
            out.push("pivotal bonds exist but none is first".to_string())
        }
        None => {}
    }
    Ok(out)
}
