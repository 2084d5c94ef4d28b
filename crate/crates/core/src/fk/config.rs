use std::ops::{Deref, DerefMut};

use crate::{error::invalid, Result};

/// Open (`true`) / closed state of every edge of an edge set, by edge id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BondConfig(pub Vec<bool>);

impl BondConfig {
    pub fn closed(m: usize) -> Self {
        BondConfig(vec![false; m])
    }

    pub fn open(m: usize) -> Self {
        BondConfig(vec![true; m])
    }

    /// Bit `e` of `mask` is the state of edge `e`.
    pub fn from_mask(m: usize, mask: u64) -> Self {
        BondConfig((0..m).map(|e| mask >> e & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        debug_assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (e, &b)| acc | (b as u64) << e)
    }

    pub fn count_open(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Edgewise maximum.
    pub fn union(&self, other: &BondConfig) -> BondConfig {
        BondConfig(self.0.iter().zip(&other.0).map(|(a, b)| *a || *b).collect())
    }

    pub fn le(&self, other: &BondConfig) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| !*a || *b)
    }
}

impl Deref for BondConfig {
    type Target = Vec<bool>;
    fn deref(&self) -> &Vec<bool> {
        &self.0
    }
}

impl DerefMut for BondConfig {
    fn deref_mut(&mut self) -> &mut Vec<bool> {
        &mut self.0
    }
}

/// Couplings `J_e ∈ [0, 1]` by edge id.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Media(pub Vec<f64>);

impl Media {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid("media", format!("coupling {v} outside [0, 1]")));
        }
        Ok(Media(values))
    }

    pub fn uniform(m: usize, j: f64) -> Result<Self> {
        Self::new(vec![j; m])
    }
}

impl Deref for Media {
    type Target = Vec<f64>;
    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip() {
        let c = BondConfig::from_mask(5, 0b10110);
        assert_eq!(c.0, vec![false, true, true, false, true]);
        assert_eq!(c.mask(), 0b10110);
        assert_eq!(c.count_open(), 3);
    }

    #[test]
    fn order() {
        let a = BondConfig::from_mask(3, 0b001);
        let b = BondConfig::from_mask(3, 0b011);
        assert!(a.le(&b) && !b.le(&a));
        assert_eq!(a.union(&BondConfig::from_mask(3, 0b100)).mask(), 0b101);
    }

    #[test]
    fn media_range() {
        assert!(Media::new(vec![0.0, 1.0, 0.5]).is_ok());
        assert!(Media::new(vec![1.5]).is_err());
    }
}
