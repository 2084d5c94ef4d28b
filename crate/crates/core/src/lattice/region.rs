use super::point::{check_dim, Point, MAX_DIM};
use crate::{error::invalid, Error, Result};

/// A nonempty axis-parallel box `∏ {lower_k ..= upper_k}` of `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    lower: Point,
    upper: Point,
}

/// One of the `2d` faces of the exterior boundary of a box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub axis: usize,
    /// `false` for `x_axis = lower - 1`, `true` for `x_axis = upper + 1`.
    pub high: bool,
}

impl Face {
    pub fn index(&self) -> usize {
        2 * self.axis + self.high as usize
    }

    pub fn from_index(i: usize) -> Face {
        Face {
            axis: i / 2,
            high: i % 2 == 1,
        }
    }
}

impl LatticeBox {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                got: upper.dim(),
            });
        }
        if (0..lower.dim()).any(|k| lower[k] > upper[k]) {
            return Err(Error::EmptyBox {
                lower: lower.coords().to_vec(),
                upper: upper.coords().to_vec(),
            });
        }
        Ok(LatticeBox { lower, upper })
    }

    pub fn from_ranges(ranges: &[(i32, i32)]) -> Result<Self> {
        check_dim(ranges.len())?;
        let lo: Vec<i32> = ranges.iter().map(|r| r.0).collect();
        let hi: Vec<i32> = ranges.iter().map(|r| r.1).collect();
        Self::new(Point::new(&lo)?, Point::new(&hi)?)
    }

    /// `{1, …, N-1}^d`.
    pub fn lambda_n(d: usize, n: i32) -> Result<Self> {
        if n < 2 {
            return Err(invalid("N", format!("need N >= 2, got {n}")));
        }
        Self::new(Point::splat(d, 1)?, Point::splat(d, n - 1)?)
    }

    /// `{-N, …, N}^d`.
    pub fn lambda_hat(d: usize, n: i32) -> Result<Self> {
        if n < 0 {
            return Err(invalid("N", format!("need N >= 0, got {n}")));
        }
        Self::new(Point::splat(d, -n)?, Point::splat(d, n)?)
    }

    /// `{1, …, N-1}^{d-1} × {1, …, H-1}`.
    pub fn slab(d: usize, n: i32, h: i32) -> Result<Self> {
        if n < 2 || h < 2 {
            return Err(invalid("N/H", format!("need N, H >= 2, got N={n}, H={h}")));
        }
        let mut r = vec![(1, n - 1); d];
        if let Some(last) = r.last_mut() {
            *last = (1, h - 1);
        }
        Self::from_ranges(&r)
    }

    /// Height `L⌈ln n⌉` of the logarithmic slab.
    pub fn log_slab_height(n: i32, l: i32) -> i32 {
        l * (n as f64).ln().ceil() as i32
    }

    /// `{1, …, Ln-1}^{d-1} × {1, …, L⌈ln n⌉-1}`.
    pub fn log_slab(d: usize, n: i32, l: i32) -> Result<Self> {
        if n < 3 || l < 1 {
            return Err(invalid(
                "n/L",
                format!("need n >= 3, L >= 1, got n={n}, L={l}"),
            ));
        }
        let h = Self::log_slab_height(n, l);
        let mut r = vec![(1, l * n - 1); d];
        if let Some(last) = r.last_mut() {
            *last = (1, h - 1);
        }
        Self::from_ranges(&r)
    }

    /// `∏ {1, …, a_k L - 1}` with every `a_k >= 2`.
    pub fn admissible(l: i32, a: &[i32]) -> Result<Self> {
        if l < 1 {
            return Err(invalid("L", "scale must be positive"));
        }
        if let Some(&bad) = a.iter().find(|&&x| x < 2) {
            return Err(Error::NotAdmissible {
                scale: l,
                reason: format!("factor {bad} < 2"),
            });
        }
        let r: Vec<(i32, i32)> = a.iter().map(|&ak| (1, ak * l - 1)).collect();
        Self::from_ranges(&r)
    }

    /// Factors `a_k` when the box is `L`-admissible.
    pub fn admissible_factors(&self, l: i32) -> Result<Vec<i32>> {
        if l < 1 {
            return Err(invalid("L", "scale must be positive"));
        }
        let mut a = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            if self.lower[k] != 1 {
                return Err(Error::NotAdmissible {
                    scale: l,
                    reason: format!("lower corner along axis {k} is {}, not 1", self.lower[k]),
                });
            }
            let top = self.upper[k] + 1;
            if top % l != 0 || top / l < 2 {
                return Err(Error::NotAdmissible {
                    scale: l,
                    reason: format!("upper corner {} along axis {k}", self.upper[k]),
                });
            }
            a.push(top / l);
        }
        Ok(a)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    #[inline]
    pub fn lower(&self) -> Point {
        self.lower
    }

    #[inline]
    pub fn upper(&self) -> Point {
        self.upper
    }

    #[inline]
    pub fn side(&self, k: usize) -> i32 {
        self.upper[k] - self.lower[k] + 1
    }

    pub fn len(&self) -> u64 {
        (0..self.dim()).map(|k| self.side(k) as u64).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && (0..self.dim()).all(|k| self.lower[k] <= p[k] && p[k] <= self.upper[k])
    }

    pub fn contains_box(&self, other: &LatticeBox) -> bool {
        self.contains(&other.lower) && self.contains(&other.upper)
    }

    pub fn intersect(&self, other: &LatticeBox) -> Option<LatticeBox> {
        let d = self.dim();
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for k in 0..d {
            lo[k] = self.lower[k].max(other.lower[k]);
            hi[k] = self.upper[k].min(other.upper[k]);
            if lo[k] > hi[k] {
                return None;
            }
        }
        Some(LatticeBox {
            lower: Point::from_slice(&lo[..d]),
            upper: Point::from_slice(&hi[..d]),
        })
    }

    /// Box grown by `r` in every direction (shrunk when `r < 0`).
    pub fn expand(&self, r: i32) -> Result<LatticeBox> {
        let d = self.dim();
        LatticeBox::new(
            self.lower - Point::from_slice(&vec![r; d]),
            self.upper + Point::from_slice(&vec![r; d]),
        )
    }

    pub fn translate(&self, by: Point) -> LatticeBox {
        LatticeBox {
            lower: self.lower + by,
            upper: self.upper + by,
        }
    }

    /// Row-major (last coordinate fastest) position of `p` inside the box.
    #[inline]
    pub fn index_of(&self, p: &Point) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for k in 0..self.dim() {
            idx = idx * self.side(k) as usize + (p[k] - self.lower[k]) as usize;
        }
        Some(idx)
    }

    pub fn point_at(&self, mut idx: usize) -> Point {
        let d = self.dim();
        let mut c = [0; MAX_DIM];
        for k in (0..d).rev() {
            let s = self.side(k) as usize;
            c[k] = self.lower[k] + (idx % s) as i32;
            idx /= s;
        }
        Point::from_slice(&c[..d])
    }

    /// Points in lexicographic order.
    pub fn iter(&self) -> BoxIter {
        BoxIter {
            bx: *self,
            next: Some(self.lower),
        }
    }

    /// `∂Λ`: sites outside the box with a nearest neighbour inside, sorted.
    pub fn exterior_boundary(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for face in self.faces() {
            out.extend(self.face_points(face));
        }
        out.sort();
        out
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> {
        let d = self.dim();
        (0..2 * d).map(Face::from_index)
    }

    /// Points of `∂Λ` lying on one face, sorted.
    pub fn face_points(&self, face: Face) -> Vec<Point> {
        let v = if face.high {
            self.upper[face.axis] + 1
        } else {
            self.lower[face.axis] - 1
        };
        let slab = LatticeBox {
            lower: self.lower.with(face.axis, v),
            upper: self.upper.with(face.axis, v),
        };
        slab.iter().collect()
    }

    /// The face of `∂Λ` containing `p`, if `p ∈ ∂Λ`.
    pub fn boundary_face(&self, p: &Point) -> Option<Face> {
        if p.dim() != self.dim() {
            return None;
        }
        let mut face = None;
        for k in 0..self.dim() {
            if p[k] < self.lower[k] - 1 || p[k] > self.upper[k] + 1 {
                return None;
            }
            if p[k] == self.lower[k] - 1 || p[k] == self.upper[k] + 1 {
                if face.is_some() {
                    return None;
                }
                face = Some(Face {
                    axis: k,
                    high: p[k] == self.upper[k] + 1,
                });
            }
        }
        face
    }

    pub fn on_boundary(&self, p: &Point) -> bool {
        self.boundary_face(p).is_some()
    }
}

pub struct BoxIter {
    bx: LatticeBox,
    next: Option<Point>,
}

impl Iterator for BoxIter {
    type Item = Point;
    fn next(&mut self) -> Option<Point> {
        let cur = self.next?;
        let mut n = cur;
        let mut k = self.bx.dim();
        loop {
            if k == 0 {
                self.next = None;
                break;
            }
            k -= 1;
            if n[k] < self.bx.upper[k] {
                n = n.offset(k, 1);
                self.next = Some(n);
                break;
            }
            n = n.with(k, self.bx.lower[k]);
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_and_boundary_sizes() {
        let b = LatticeBox::lambda_n(2, 3).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.exterior_boundary().len(), 8);
        let b3 = LatticeBox::lambda_n(3, 4).unwrap();
        assert_eq!(b3.exterior_boundary().len(), 6 * 9);
    }

    #[test]
    fn iteration_matches_index() {
        let b = LatticeBox::from_ranges(&[(-1, 1), (2, 4), (0, 1)]).unwrap();
        let pts: Vec<Point> = b.iter().collect();
        assert_eq!(pts.len() as u64, b.len());
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(b.index_of(p), Some(i));
            assert_eq!(b.point_at(i), *p);
        }
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn log_slab_shape() {
        let s = LatticeBox::log_slab(2, 8, 4).unwrap();
        assert_eq!(s.upper().coords(), &[31, 11]);
    }

    #[test]
    fn admissible_round_trip() {
        let b = LatticeBox::admissible(5, &[2, 3]).unwrap();
        assert_eq!(b.admissible_factors(5).unwrap(), vec![2, 3]);
        assert!(b.admissible_factors(4).is_err());
        assert!(LatticeBox::admissible(5, &[1, 3]).is_err());
    }

    #[test]
    fn faces_partition_boundary() {
        let b = LatticeBox::from_ranges(&[(1, 3), (1, 2)]).unwrap();
        let total: usize = b.faces().map(|f| b.face_points(f).len()).sum();
        assert_eq!(total, b.exterior_boundary().len());
        for p in b.exterior_boundary() {
            assert!(b.boundary_face(&p).is_some());
        }
        assert!(b.boundary_face(&Point::new(&[0, 0]).unwrap()).is_none());
    }

    #[test]
    fn empty_box_rejected() {
        assert!(LatticeBox::from_ranges(&[(2, 1)]).is_err());
        assert!(LatticeBox::lambda_n(2, 1).is_err());
    }
}
