use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use crate::{Error, Result};

pub const MAX_DIM: usize = 4;

/// A site of `Z^d`, `1 <= d <= 4`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    dim: u8,
    coords: [i32; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[i32]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    /// Panics on an unsupported dimension; used for internally generated points.
    pub(crate) fn from_slice(coords: &[i32]) -> Self {
        Self::new(coords).expect("dimension checked by caller")
    }

    pub fn splat(dim: usize, v: i32) -> Result<Self> {
        check_dim(dim)?;
        let mut c = [0; MAX_DIM];
        c[..dim].iter_mut().for_each(|x| *x = v);
        Ok(Point {
            dim: dim as u8,
            coords: c,
        })
    }

    pub fn origin(dim: usize) -> Result<Self> {
        Self::splat(dim, 0)
    }

    pub fn unit(dim: usize, k: usize) -> Result<Self> {
        let mut p = Self::origin(dim)?;
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: k + 1,
            });
        }
        p.coords[k] = 1;
        Ok(p)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn with(mut self, k: usize, v: i32) -> Self {
        debug_assert!(k < self.dim());
        self.coords[k] = v;
        self
    }

    #[inline]
    pub fn offset(mut self, k: usize, delta: i32) -> Self {
        debug_assert!(k < self.dim());
        self.coords[k] += delta;
        self
    }

    pub fn linf_dist(&self, other: &Point) -> i32 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or(0)
    }

    pub fn l1_dist(&self, other: &Point) -> i32 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Nearest neighbours in `Z^d`.
    pub fn is_adjacent(&self, other: &Point) -> bool {
        self.dim == other.dim && self.l1_dist(other) == 1
    }

    /// Index of the single coordinate in which two adjacent points differ.
    pub fn axis_to(&self, other: &Point) -> Option<usize> {
        if !self.is_adjacent(other) {
            return None;
        }
        (0..self.dim()).find(|&k| self.coords[k] != other.coords[k])
    }

    pub fn neighbours(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.dim()).flat_map(move |k| [self.offset(k, -1), self.offset(k, 1)])
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        Err(Error::UnsupportedDimension(d))
    } else {
        Ok(())
    }
}

impl Index<usize> for Point {
    type Output = i32;
    fn index(&self, k: usize) -> &i32 {
        &self.coords()[k]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..self.dim() {
            self.coords[k] += rhs.coords[k];
        }
        self
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..self.dim() {
            self.coords[k] -= rhs.coords[k];
        }
        self
    }
}

impl Mul<i32> for Point {
    type Output = Point;
    fn mul(mut self, s: i32) -> Point {
        for k in 0..self.dim() {
            self.coords[k] *= s;
        }
        self
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_lexicographic() {
        let a = Point::new(&[0, 5]).unwrap();
        let b = Point::new(&[1, 0]).unwrap();
        assert!(a < b);
    }

    #[test]
    fn adjacency() {
        let a = Point::new(&[1, 1, 1]).unwrap();
        assert!(a.is_adjacent(&a.offset(2, 1)));
        assert!(!a.is_adjacent(&a.offset(2, 1).offset(0, 1)));
        assert_eq!(a.axis_to(&a.offset(1, -1)), Some(1));
        assert_eq!(a.neighbours().count(), 6);
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(Point::new(&[]).is_err());
        assert!(Point::new(&[0; 5]).is_err());
    }
}
