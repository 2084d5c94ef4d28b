use super::point::Point;
use super::region::LatticeBox;
use crate::{Error, Result};

/// The `(L, L')`-covering of a box `Λ = z + ∏ {1, …, L_k}` by cores `Δ_i`
/// and halos `Δ'_i ⊇ Δ_i`.
#[derive(Clone, Debug)]
pub struct Covering {
    pub lambda: LatticeBox,
    pub scale: i32,
    pub margin: i32,
    pub indices: Vec<Point>,
    pub cores: Vec<LatticeBox>,
    pub halos: Vec<LatticeBox>,
    index_box: LatticeBox,
}

impl Covering {
    pub fn new(lambda: &LatticeBox, l: i32, lp: i32) -> Result<Covering> {
        let d = lambda.dim();
        let min_side = (0..d).map(|k| lambda.side(k)).min().unwrap_or(0);
        if l < 1 {
            return Err(Error::Covering(format!("L must be positive, got {l}")));
        }
        if lp < 0 || lp > l {
            return Err(Error::Covering(format!(
                "need 0 <= L' <= L, got L = {l}, L' = {lp}"
            )));
        }
        if l + 2 * lp > min_side {
            return Err(Error::Covering(format!(
                "need L + 2L' <= min side, got {} > {min_side}",
                l + 2 * lp
            )));
        }
        let z: Vec<i32> = (0..d).map(|k| lambda.lower()[k] - 1).collect();
        let sides: Vec<i32> = (0..d).map(|k| lambda.side(k)).collect();
        let ranges: Vec<(i32, i32)> = sides.iter().map(|&s| (0, (s + l - 1) / l - 1)).collect();
        let index_box = LatticeBox::from_ranges(&ranges)?;
        let indices: Vec<Point> = index_box.iter().collect();
        let mut cores = Vec::with_capacity(indices.len());
        let mut halos = Vec::with_capacity(indices.len());
        for i in &indices {
            let mut lo = vec![0; d];
            let mut hi = vec![0; d];
            let mut hlo = vec![0; d];
            let mut hhi = vec![0; d];
            for k in 0..d {
                let x = z[k] + (l * i[k]).min(sides[k] - l);
                let xp = z[k] + (l * i[k]).max(lp).min(sides[k] - l - lp);
                lo[k] = x + 1;
                hi[k] = x + l;
                hlo[k] = xp - lp + 1;
                hhi[k] = xp + l + lp;
            }
            cores.push(LatticeBox::new(Point::new(&lo)?, Point::new(&hi)?)?);
            halos.push(LatticeBox::new(Point::new(&hlo)?, Point::new(&hhi)?)?);
        }
        Ok(Covering {
            lambda: *lambda,
            scale: l,
            margin: lp,
            indices,
            cores,
            halos,
            index_box,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, i: &Point) -> Option<usize> {
        self.index_box.index_of(i)
    }

    /// `x'_i`: the halo minus its margin, lower corner minus one.
    pub fn halo_anchor(&self, k: usize) -> Point {
        let d = self.lambda.dim();
        self.halos[k].lower() + Point::from_slice(&vec![self.margin - 1; d])
    }

    /// Brute-force check of the covering properties.
    pub fn audit(&self) -> CoveringAudit {
        let lam = &self.lambda;
        let d = lam.dim();
        let n = lam.len() as usize;
        let (l, lp) = (self.scale, self.margin);
        let mut failures = Vec::new();

        let mut core_count = vec![0u32; n];
        for c in &self.cores {
            if !lam.contains_box(c) {
                failures.push(format!("core {c:?} leaves the box"));
            }
            for p in c.iter() {
                if let Some(ix) = lam.index_of(&p) {
                    core_count[ix] += 1;
                }
            }
        }
        let covers = core_count.iter().all(|&c| c > 0);
        if !covers {
            failures.push("cores do not cover the box".into());
        }

        let mut separated = true;
        for (c, h) in self.cores.iter().zip(&self.halos) {
            if !h.contains_box(c) {
                separated = false;
                failures.push(format!("core {c:?} not inside halo {h:?}"));
                continue;
            }
            if lp > 0 {
                let nb = c.expand(lp).ok().and_then(|b| b.intersect(lam));
                if let Some(nb) = nb {
                    if let Some(p) = nb.iter().find(|p| !h.contains(p)) {
                        separated = false;
                        failures.push(format!(
                            "{p:?} within distance {lp} of core {c:?} lies outside halo"
                        ));
                    }
                }
            }
        }

        let mut overlap = true;
        for (a, i) in self.indices.iter().enumerate() {
            for k in 0..d {
                let j = i.offset(k, 1);
                let Some(b) = self.position(&j) else { continue };
                let xj = self.halo_anchor(b);
                let hj = &self.halos[b];
                let slab_hi = hj.upper().with(k, (xj[k] + lp).min(hj.upper()[k]));
                if let Ok(slab) = LatticeBox::new(hj.lower(), slab_hi) {
                    if !self.halos[a].contains_box(&slab) {
                        overlap = false;
                        failures.push(format!(
                            "overlap slab of {j:?} along axis {k} not in halo of {i:?}"
                        ));
                    }
                }
            }
        }

        let z = lam.lower() - Point::from_slice(&vec![1; d]);
        let mut unique = true;
        for (ix, p) in lam.iter().enumerate() {
            let rel = p - z;
            if (0..d).all(|k| rel[k] <= lam.side(k) - l) && core_count[ix] != 1 {
                unique = false;
                failures.push(format!("{p:?} lies in {} cores", core_count[ix]));
            }
        }

        let mut halo_count = vec![0u32; n];
        for h in &self.halos {
            for p in h.iter() {
                if let Some(ix) = lam.index_of(&p) {
                    halo_count[ix] += 1;
                }
            }
        }
        let max_multiplicity = halo_count.iter().copied().max().unwrap_or(0) as usize;
        let bound = 6usize.pow(d as u32);
        let bounded = max_multiplicity <= bound;
        if !bounded {
            failures.push(format!(
                "halo multiplicity {max_multiplicity} exceeds {bound}"
            ));
        }

        CoveringAudit {
            covers,
            separated,
            overlap,
            unique,
            bounded,
            max_multiplicity,
            failures,
        }
    }
}

/// Outcome of [`Covering::audit`], one flag per property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringAudit {
    pub covers: bool,
    pub separated: bool,
    pub overlap: bool,
    pub unique: bool,
    pub bounded: bool,
    pub max_multiplicity: usize,
    pub failures: Vec<String>,
}

impl CoveringAudit {
    pub fn passed(&self) -> bool {
        self.covers && self.separated && self.overlap && self.unique && self.bounded
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_covering() {
        let lam = LatticeBox::from_ranges(&[(1, 10), (1, 7)]).unwrap();
        let c = Covering::new(&lam, 3, 1).unwrap();
        assert_eq!(c.len(), 4 * 3);
        let a = c.audit();
        assert!(a.passed(), "{:?}", a.failures);
    }

    #[test]
    fn zero_margin() {
        let lam = LatticeBox::from_ranges(&[(5, 9)]).unwrap();
        let c = Covering::new(&lam, 2, 0).unwrap();
        assert_eq!(c.cores, c.halos);
        assert!(c.audit().passed());
    }

    #[test]
    fn invalid_parameters() {
        let lam = LatticeBox::from_ranges(&[(1, 6), (1, 6)]).unwrap();
        assert!(Covering::new(&lam, 3, 2).is_err());
        assert!(Covering::new(&lam, 2, 3).is_err());
        assert!(Covering::new(&lam, 0, 0).is_err());
    }
}
