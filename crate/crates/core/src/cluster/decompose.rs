use super::union_find::UnionFind;
use crate::fk::BoundaryPartition;
use crate::lattice::{Graph, LatticeBox};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterInfo {
    /// Sorted vertex ids.
    pub vertices: Vec<u32>,
    /// `ℓ∞` diameter of the member coordinates.
    pub diameter: i32,
}

impl ClusterInfo {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// Clusters of a configuration; ids are ordered by smallest member vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterDecomposition {
    pub cluster_of: Vec<u32>,
    pub clusters: Vec<ClusterInfo>,
}

impl ClusterDecomposition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn largest(&self) -> Option<usize> {
        (0..self.clusters.len()).max_by_key(|&c| (self.clusters[c].size(), std::cmp::Reverse(c)))
    }
}

/// Clusters of the open edges of `omega`, with `π` wiring contracted when given.
pub fn decompose(
    graph: &Graph,
    omega: &[bool],
    pi: Option<&BoundaryPartition>,
) -> ClusterDecomposition {
    let n = graph.num_vertices();
    let mut uf = UnionFind::new(n);
    if let Some(pi) = pi {
        let span = graph.boundary_span();
        for block in pi.blocks() {
            for w in block.windows(2) {
                uf.union(span[w[0]], span[w[1]]);
            }
        }
    }
    for (e, &open) in omega.iter().enumerate() {
        if open {
            let (a, b) = graph.ends(e);
            uf.union(a, b);
        }
    }
    let mut id_of_root = vec![u32::MAX; n];
    let mut cluster_of = vec![0u32; n];
    let mut members: Vec<Vec<u32>> = Vec::new();
    for v in 0..n as u32 {
        let r = uf.find(v) as usize;
        if id_of_root[r] == u32::MAX {
            id_of_root[r] = members.len() as u32;
            members.push(Vec::new());
        }
        cluster_of[v as usize] = id_of_root[r];
        members[id_of_root[r] as usize].push(v);
    }
    let d = graph.dim();
    let clusters = members
        .into_iter()
        .map(|vertices| {
            let mut lo = [i32::MAX; 4];
            let mut hi = [i32::MIN; 4];
            for &v in &vertices {
                let p = graph.vertex(v);
                for k in 0..d {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            let diameter = (0..d).map(|k| hi[k] - lo[k]).max().unwrap_or(0);
            ClusterInfo { vertices, diameter }
        })
        .collect();
    ClusterDecomposition {
        cluster_of,
        clusters,
    }
}

/// Bitmask of the faces of `∂Λ` touched by each cluster.
pub fn face_masks(graph: &Graph, dec: &ClusterDecomposition, lambda: &LatticeBox) -> Vec<u32> {
    let mut masks = vec![0u32; dec.len()];
    for (v, p) in graph.vertices().iter().enumerate() {
        if let Some(f) = lambda.boundary_face(p) {
            masks[dec.cluster_of[v] as usize] |= 1 << f.index();
        }
    }
    masks
}

/// Crossing clusters for a configuration on `E^w(Λ)`.
#[derive(Clone, Debug)]
pub struct CrossingReport {
    pub decomposition: ClusterDecomposition,
    /// Ids of clusters touching every face of `∂Λ`.
    pub crossing: Vec<usize>,
}

impl CrossingReport {
    /// The largest crossing cluster.
    pub fn cluster(&self) -> Option<usize> {
        self.crossing
            .iter()
            .copied()
            .max_by_key(|&c| (self.decomposition.clusters[c].size(), std::cmp::Reverse(c)))
    }

    /// A crossing cluster exists and every cluster of diameter `>= l` is it.
    pub fn unique_large(&self, l: i32) -> bool {
        let Some(c) = self.cluster() else {
            return false;
        };
        self.decomposition
            .clusters
            .iter()
            .enumerate()
            .all(|(i, info)| i == c || info.diameter < l)
    }
}

pub fn crossing_report(graph: &Graph, omega: &[bool], lambda: &LatticeBox) -> CrossingReport {
    let dec = decompose(graph, omega, None);
    let full = (1u32 << (2 * lambda.dim())) - 1;
    let crossing = face_masks(graph, &dec, lambda)
        .iter()
        .enumerate()
        .filter(|(_, &m)| m == full)
        .map(|(c, _)| c)
        .collect();
    CrossingReport {
        decomposition: dec,
        crossing,
    }
}

/// A cluster touching every face of `∂Λ`, the largest if several.
pub fn crossing_cluster(graph: &Graph, omega: &[bool], lambda: &LatticeBox) -> Option<usize> {
    crossing_report(graph, omega, lambda).cluster()
}

pub fn unique_large(graph: &Graph, omega: &[bool], lambda: &LatticeBox, l: i32) -> bool {
    crossing_report(graph, omega, lambda).unique_large(l)
}

/// `|C ∩ Λ| / |Λ|`.
pub fn density(graph: &Graph, info: &ClusterInfo, lambda: &LatticeBox) -> f64 {
    let inside = info
        .vertices
        .iter()
        .filter(|&&v| lambda.contains(&graph.vertex(v)))
        .count();
    inside as f64 / lambda.len() as f64
}

/// Clusters with no vertex outside `Δ` and at most `threshold` vertices.
pub fn isolated_small_clusters(
    graph: &Graph,
    omega: &[bool],
    delta: &LatticeBox,
    threshold: Option<usize>,
) -> usize {
    let dec = decompose(graph, omega, None);
    dec.clusters
        .iter()
        .filter(|c| threshold.map_or(true, |t| c.size() <= t))
        .filter(|c| c.vertices.iter().all(|&v| delta.contains(&graph.vertex(v))))
        .count()
}
