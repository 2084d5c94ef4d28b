use crate::lattice::Graph;
use crate::{Error, Result};

/// Largest boundary span for which all partitions are enumerated.
pub const MAX_ENUMERATED_SPAN: usize = 12;

/// A set partition of the boundary span of an edge set, written as a
/// restricted growth string aligned with [`Graph::boundary_span`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPartition {
    labels: Vec<u32>,
}

impl BoundaryPartition {
    pub fn free(n: usize) -> Self {
        BoundaryPartition {
            labels: (0..n as u32).collect(),
        }
    }

    pub fn wired(n: usize) -> Self {
        BoundaryPartition { labels: vec![0; n] }
    }

    /// Any labelling; relabelled to canonical form.
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        BoundaryPartition { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.labels
            .iter()
            .max()
            .map(|m| *m as usize + 1)
            .unwrap_or(0)
    }

    /// Blocks as lists of positions in the boundary span.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut b = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            b[l as usize].push(i);
        }
        b
    }

    /// Partition with blocks `a` and `b` merged.
    pub fn merge(&self, a: u32, b: u32) -> Self {
        let labels: Vec<u32> = self
            .labels
            .iter()
            .map(|&l| if l == b { a } else { l })
            .collect();
        Self::from_labels(&labels)
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &BoundaryPartition) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut image = vec![u32::MAX; self.num_blocks()];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            let slot = &mut image[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            } else if *slot != b {
                return false;
            }
        }
        true
    }

    pub fn is_wired(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    pub fn is_free(&self) -> bool {
        self.labels
            .iter()
            .enumerate()
            .all(|(i, &l)| l as usize == i)
    }
}

/// All set partitions of an `n`-set, lexicographic in restricted growth form.
pub fn set_partitions(n: usize) -> SetPartitions {
    SetPartitions {
        a: vec![0; n],
        b: vec![1; n],
        done: false,
    }
}

pub struct SetPartitions {
    a: Vec<u32>,
    // b[i] = 1 + max(a[0..i])
    b: Vec<u32>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = BoundaryPartition;
    fn next(&mut self) -> Option<BoundaryPartition> {
        if self.done {
            return None;
        }
        let out = BoundaryPartition {
            labels: self.a.clone(),
        };
        let n = self.a.len();
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.a[i] < self.b[i] {
                self.a[i] += 1;
                let m = self.b[i].max(self.a[i] + 1);
                for k in i + 1..n {
                    self.a[k] = 0;
                    self.b[k] = m;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn bell_number(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let v = next.last().unwrap().saturating_add(x);
            next.push(v);
        }
        row = next;
    }
    row[0]
}

/// All boundary conditions of the edge set behind `graph`, wired first, free last.
pub fn boundary_classes(graph: &Graph) -> Result<Vec<BoundaryPartition>> {
    let n = graph.boundary_span().len();
    if n > MAX_ENUMERATED_SPAN {
        return Err(Error::TooLarge {
            what: "boundary span",
            size: n as u64,
            limit: MAX_ENUMERATED_SPAN as u64,
        });
    }
    Ok(set_partitions(n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_bell() {
        for n in 0..=8 {
            assert_eq!(set_partitions(n).count() as u64, bell_number(n));
        }
        assert_eq!(bell_number(12), 4_213_597);
    }

    #[test]
    fn order_and_extremes() {
        let all: Vec<_> = set_partitions(4).collect();
        assert!(all.first().unwrap().is_wired());
        assert!(all.last().unwrap().is_free());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn refinement() {
        let f = BoundaryPartition::free(3);
        let w = BoundaryPartition::wired(3);
        let m = f.merge(0, 2);
        assert_eq!(m.labels(), &[0, 1, 0]);
        assert!(f.refines(&m) && m.refines(&w) && !w.refines(&m));
        assert_eq!(m.blocks(), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn canonical_labels() {
        assert_eq!(
            BoundaryPartition::from_labels(&[7, 3, 7, 9]).labels(),
            &[0, 1, 0, 2]
        );
    }
}
