use std::collections::VecDeque;

use crate::lattice::{LatticeBox, Point};

/// Whether `indices` separates the bottom layer of `region` from its top layer,
/// i.e. no `*`-connected path in `region \ indices` joins them. Indices outside
/// `region` are ignored.
pub fn horizontal_interface(indices: &[Point], region: &LatticeBox) -> bool {
    let d = region.dim();
    let n = region.len() as usize;
    let mut blocked = vec![false; n];
    for p in indices {
        if let Some(i) = region.index_of(p) {
            blocked[i] = true;
        }
    }
    let bottom = region.lower()[d - 1];
    let top = region.upper()[d - 1];
    let mut seen = blocked.clone();
    let mut queue = VecDeque::new();
    for (i, p) in region.iter().enumerate() {
        if p[d - 1] == bottom && !seen[i] {
            seen[i] = true;
            queue.push_back(p);
        }
    }
    let unit = LatticeBox::from_ranges(&vec![(-1, 1); d]).expect("valid dimension");
    while let Some(p) = queue.pop_front() {
        if p[d - 1] == top {
            return false;
        }
        for off in unit.iter() {
            if off.coords().iter().all(|&c| c == 0) {
                continue;
            }
            let q = p + off;
            if let Some(i) = region.index_of(&q) {
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[i32]) -> Point {
        Point::new(c).unwrap()
    }

    #[test]
    fn full_slice_and_empty() {
        let r = LatticeBox::from_ranges(&[(0, 5), (0, 5)]).unwrap();
        let slice: Vec<Point> = (0..6).map(|x| pt(&[x, 3])).collect();
        assert!(horizontal_interface(&slice, &r));
        assert!(!horizontal_interface(&[], &r));
    }

    #[test]
    fn diagonal_gap_leaks() {
        let r = LatticeBox::from_ranges(&[(0, 3), (0, 3)]).unwrap();
        // staircase: (0,1),(1,1),(2,2),(3,2) blocks *-paths? (1,1)->(2,2) leaves a diagonal gap at (2,1)/(1,2)
        let s = vec![pt(&[0, 1]), pt(&[1, 1]), pt(&[2, 2]), pt(&[3, 2])];
        assert!(!horizontal_interface(&s, &r));
        let s2 = vec![
            pt(&[0, 1]),
            pt(&[1, 1]),
            pt(&[2, 1]),
            pt(&[2, 2]),
            pt(&[3, 2]),
        ];
        assert!(horizontal_interface(&s2, &r));
    }
}
