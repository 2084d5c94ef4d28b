use super::edges::EdgeSet;
use super::point::Point;
use super::region::LatticeBox;
use crate::{error::invalid, Result};

/// Block `i` at scale `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub index: Point,
    pub scale: i32,
}

impl Block {
    pub fn new(index: Point, scale: i32) -> Self {
        Block { index, scale }
    }

    fn shift(&self) -> Point {
        self.index * self.scale
    }

    /// `{1, …, L-1}^d + Li`.
    pub fn interior(&self) -> LatticeBox {
        let d = self.index.dim();
        let lo = Point::from_slice(&vec![1; d]) + self.shift();
        let hi = Point::from_slice(&vec![self.scale - 1; d]) + self.shift();
        LatticeBox::new(lo, hi).expect("L >= 2 gives a nonempty interior")
    }

    /// `{0, …, L}^d + Li`.
    pub fn closed(&self) -> LatticeBox {
        let d = self.index.dim();
        let lo = self.shift();
        let hi = Point::from_slice(&vec![self.scale; d]) + self.shift();
        LatticeBox::new(lo, hi).expect("nonempty")
    }

    /// `(Li + {-nL+1, …, (n+1)L-1}^d) ∩ Λ`.
    pub fn enlarged(&self, n: i32, within: &LatticeBox) -> Option<LatticeBox> {
        let d = self.index.dim();
        let lo = Point::from_slice(&vec![-n * self.scale + 1; d]) + self.shift();
        let hi = Point::from_slice(&vec![(n + 1) * self.scale - 1; d]) + self.shift();
        LatticeBox::new(lo, hi).ok()?.intersect(within)
    }

    /// `E^w` of the interior.
    pub fn interior_edges(&self) -> EdgeSet {
        EdgeSet::wired(&self.interior())
    }
}

/// `I_{Λ,L} = ∏ {0, …, a_k - 1}` in lexicographic order.
pub fn block_indices(lambda: &LatticeBox, l: i32) -> Result<Vec<Point>> {
    let a = lambda.admissible_factors(l)?;
    let r: Vec<(i32, i32)> = a.iter().map(|&ak| (0, ak - 1)).collect();
    Ok(LatticeBox::from_ranges(&r)?.iter().collect())
}

/// Decomposition of `E^w(Λ)` into block interiors and lateral edges.
/// All edge ids refer to positions in `EdgeSet::wired(Λ)`.
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub lambda: LatticeBox,
    pub scale: i32,
    pub indices: Vec<Point>,
    /// `Ė^L_i = E^w(Ḃ^L_i)`.
    pub interior_edges: Vec<Vec<u32>>,
    /// `E^L_i = E^f(B^L_i) ∩ E^w(Λ)`.
    pub block_edges: Vec<Vec<u32>>,
    /// `E^w(Λ)` minus the union of the `Ė^L_i`.
    pub lateral: Vec<u32>,
}

pub fn block_partition(lambda: &LatticeBox, l: i32) -> Result<BlockPartition> {
    if l < 2 {
        return Err(invalid("L", format!("block scale must be >= 2, got {l}")));
    }
    let indices = block_indices(lambda, l)?;
    let wired = EdgeSet::wired(lambda);
    let mut owner = vec![false; wired.len()];
    let mut interior_edges = Vec::with_capacity(indices.len());
    let mut block_edges = Vec::with_capacity(indices.len());
    for &i in &indices {
        let b = Block::new(i, l);
        let ids: Vec<u32> = b
            .interior_edges()
            .iter()
            .map(|e| wired.position(e).expect("interior edges lie in E^w(Λ)") as u32)
            .collect();
        for &e in &ids {
            owner[e as usize] = true;
        }
        interior_edges.push(ids);
        let ids: Vec<u32> = EdgeSet::free(&b.closed())
            .iter()
            .filter_map(|e| wired.position(e).map(|p| p as u32))
            .collect();
        block_edges.push(ids);
    }
    let lateral = (0..wired.len() as u32)
        .filter(|&e| !owner[e as usize])
        .collect();
    Ok(BlockPartition {
        lambda: *lambda,
        scale: l,
        indices,
        interior_edges,
        block_edges,
        lateral,
    })
}

/// A facet `Li + Lε e_κ + Hj + ({0, …, H-1}^d ∩ {x_κ = 0})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Facet {
    pub block: Point,
    pub scale: i32,
    pub size: i32,
    pub axis: usize,
    pub high: bool,
    pub offset: Point,
}

impl Facet {
    pub fn region(&self) -> LatticeBox {
        let d = self.block.dim();
        let mut base = self.block * self.scale + self.offset * self.size;
        if self.high {
            base = base.offset(self.axis, self.scale);
        }
        let hi = Point::from_slice(&vec![self.size - 1; d]).with(self.axis, 0);
        LatticeBox::new(base, base + hi).expect("H >= 1")
    }

    pub fn edges(&self) -> EdgeSet {
        EdgeSet::free(&self.region())
    }
}

/// Offsets `j` with `j_κ = 0` and `L <= 3Hj_k`, `3H(j_k + 1) <= 2L` otherwise,
/// in lexicographic order.
pub fn facet_offsets(dim: usize, l: i32, h: i32, axis: usize) -> Vec<Point> {
    let lo = (l + 3 * h - 1).div_euclid(3 * h);
    let hi = (2 * l).div_euclid(3 * h) - 1;
    if lo > hi {
        return Vec::new();
    }
    let r: Vec<(i32, i32)> = (0..dim)
        .map(|k| if k == axis { (0, 0) } else { (lo, hi) })
        .collect();
    match LatticeBox::from_ranges(&r) {
        Ok(b) => b.iter().collect(),
        Err(_) => Vec::new(),
    }
}

/// All candidate facets on one face of block `i`, in lexicographic order of `j`.
pub fn face_facets(block: &Block, h: i32, axis: usize, high: bool) -> Vec<Facet> {
    facet_offsets(block.index.dim(), block.scale, h, axis)
        .into_iter()
        .map(|offset| Facet {
            block: block.index,
            scale: block.scale,
            size: h,
            axis,
            high,
            offset,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_example() {
        let offs = facet_offsets(2, 30, 2, 0);
        let js: Vec<i32> = offs.iter().map(|p| p[1]).collect();
        assert_eq!(js, vec![5, 6, 7, 8, 9]);
        assert!(offs.iter().all(|p| p[0] == 0));
    }

    #[test]
    fn partition_covers_wired_edges() {
        let lam = LatticeBox::admissible(4, &[2, 3]).unwrap();
        let part = block_partition(&lam, 4).unwrap();
        assert_eq!(part.indices.len(), 6);
        let total = EdgeSet::wired(&lam).len();
        let mut seen = vec![0u8; total];
        for ids in &part.interior_edges {
            for &e in ids {
                seen[e as usize] += 1;
            }
        }
        for &e in &part.lateral {
            seen[e as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn block_edges_contain_interior() {
        let lam = LatticeBox::admissible(3, &[2, 2]).unwrap();
        let part = block_partition(&lam, 3).unwrap();
        for (inner, full) in part.interior_edges.iter().zip(&part.block_edges) {
            assert!(inner.iter().all(|e| full.contains(e)));
        }
    }

    #[test]
    fn facet_geometry() {
        let b = Block::new(Point::new(&[1, 0]).unwrap(), 30);
        let f = face_facets(&b, 2, 0, true);
        assert_eq!(f.len(), 5);
        let r = f[0].region();
        assert_eq!(r.lower().coords(), &[60, 10]);
        assert_eq!(r.upper().coords(), &[60, 11]);
        assert_eq!(f[0].edges().len(), 1);
    }

    #[test]
    fn enlarged_clipped() {
        let lam = LatticeBox::admissible(4, &[3, 3]).unwrap();
        let b = Block::new(Point::new(&[0, 0]).unwrap(), 4);
        let e = b.enlarged(1, &lam).unwrap();
        assert_eq!(e.lower().coords(), &[1, 1]);
        assert_eq!(e.upper().coords(), &[7, 7]);
    }
}
