use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::vector::IntVector;

/// An axis-aligned box `[lo, hi]` (inclusive) of `Z^d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Region {
    pub lo: IntVector,
    pub hi: IntVector,
}

impl Region {
    pub fn new(lo: IntVector, hi: IntVector) -> Result<Self> {
        Error::check_dim(lo.dim(), hi.dim())?;
        if lo.iter().zip(hi.iter()).any(|(a, b)| a > b) {
            return Err(Error::Invalid(format!("empty box {lo}..{hi}")));
        }
        Ok(Region { lo, hi })
    }

    /// `[-r, r]^d`.
    pub fn centered(dim: usize, r: i64) -> Self {
        Region {
            lo: IntVector::new(vec![-r; dim]),
            hi: IntVector::new(vec![r; dim]),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(a, b)| (b - a + 1) as usize)
            .collect()
    }

    pub fn size(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        x.dim() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn contains_region(&self, other: &Region) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    /// Row-major index, last coordinate fastest.
    pub fn index_of(&self, x: &IntVector) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let mut idx = 0usize;
        for i in 0..self.dim() {
            let extent = (self.hi[i] - self.lo[i] + 1) as usize;
            idx = idx * extent + (x[i] - self.lo[i]) as usize;
        }
        Some(idx)
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> RegionPoints {
        RegionPoints {
            region: self.clone(),
            next: Some(self.lo.to_vec()),
        }
    }

    pub fn translate(&self, t: &IntVector) -> Region {
        Region {
            lo: &self.lo + t,
            hi: &self.hi + t,
        }
    }

    pub fn intersect(&self, other: &Region) -> Option<Region> {
        let lo: Vec<i64> = self.lo.iter().zip(other.lo.iter()).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = self.hi.iter().zip(other.hi.iter()).map(|(a, b)| *a.min(b)).collect();
        Region::new(IntVector::new(lo), IntVector::new(hi)).ok()
    }

    /// `{u : u - e ∈ self for every e in offsets}`; `None` when empty.
    pub fn erode(&self, offsets: &[IntVector]) -> Option<Region> {
        if offsets.is_empty() {
            return Some(self.clone());
        }
        let d = self.dim();
        let lo: Vec<i64> = (0..d)
            .map(|i| self.lo[i] + offsets.iter().map(|e| e[i]).max().unwrap())
            .collect();
        let hi: Vec<i64> = (0..d)
            .map(|i| self.hi[i] + offsets.iter().map(|e| e[i]).min().unwrap())
            .collect();
        Region::new(IntVector::new(lo), IntVector::new(hi)).ok()
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub struct RegionPoints {
    region: Region,
    next: Option<Vec<i64>>,
}

impl Iterator for RegionPoints {
    type Item = IntVector;

    fn next(&mut self) -> Option<IntVector> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] <= self.region.hi[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = self.region.lo[i];
        }
        Some(IntVector::new(cur))
    }
}

/// Values known only inside a box; nothing is claimed outside it.
#[derive(Clone, PartialEq, Eq)]
pub struct WindowConfig {
    region: Region,
    values: Vec<BigInt>,
}

impl WindowConfig {
    pub fn new(lo: IntVector, hi: IntVector, values: Vec<BigInt>) -> Result<Self> {
        let region = Region::new(lo, hi)?;
        if values.len() != region.size() {
            return Err(Error::Invalid(format!(
                "window {region} needs {} values, got {}",
                region.size(),
                values.len()
            )));
        }
        Ok(WindowConfig { region, values })
    }

    pub fn zeros(region: Region) -> Self {
        let n = region.size();
        WindowConfig {
            region,
            values: vec![BigInt::zero(); n],
        }
    }

    pub fn from_fn<F>(region: Region, mut f: F) -> Result<Self>
    where
        F: FnMut(&IntVector) -> Result<BigInt>,
    {
        let values = region.points().map(|p| f(&p)).collect::<Result<Vec<_>>>()?;
        Ok(WindowConfig { region, values })
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn lo(&self) -> &IntVector {
        &self.region.lo
    }

    pub fn hi(&self) -> &IntVector {
        &self.region.hi
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn get(&self, x: &IntVector) -> Result<&BigInt> {
        self.region
            .index_of(x)
            .map(|i| &self.values[i])
            .ok_or_else(|| Error::OutOfDomain { point: x.clone() })
    }

    pub fn sub_window(&self, region: &Region) -> Result<WindowConfig> {
        if !self.region.contains_region(region) {
            return Err(Error::OutOfDomain {
                point: if self.region.contains(&region.lo) {
                    region.hi.clone()
                } else {
                    region.lo.clone()
                },
            });
        }
        WindowConfig::from_fn(region.clone(), |p| self.get(p).cloned())
    }

    pub fn translate(&self, t: &IntVector) -> WindowConfig {
        WindowConfig {
            region: self.region.translate(t),
            values: self.values.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Plain-text dump of a 2-D window, rows top to bottom by decreasing
    /// second coordinate.
    pub fn text_grid(&self) -> Option<String> {
        if self.dim() != 2 {
            return None;
        }
        let width = self.values.iter().map(|v| v.to_string().len()).max().unwrap_or(1);
        let mut out = String::new();
        for y in (self.region.lo[1]..=self.region.hi[1]).rev() {
            let row: Vec<String> = (self.region.lo[0]..=self.region.hi[0])
                .map(|x| {
                    format!(
                        "{:>width$}",
                        self.get(&IntVector::new(vec![x, y])).unwrap().to_string()
                    )
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        Some(out)
    }
}

impl fmt::Debug for WindowConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WindowConfig({}, {:?})", self.region, self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iv;

    #[test]
    fn points_are_row_major() {
        let r = Region::new(iv![0, 0], iv![1, 2]).unwrap();
        let pts: Vec<_> = r.points().collect();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], iv![0, 0]);
        assert_eq!(pts[1], iv![0, 1]);
        assert_eq!(pts[3], iv![1, 0]);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(r.index_of(p), Some(i));
        }
    }

    #[test]
    fn erosion() {
        let r = Region::new(iv![0, 0], iv![9, 9]).unwrap();
        let e = r.erode(&[iv![0, 0], iv![2, -1]]).unwrap();
        assert_eq!(e, Region::new(iv![2, 0], iv![9, 8]).unwrap());
        assert!(r.erode(&[iv![0, 0], iv![10, 0]]).is_none());
    }

    #[test]
    fn window_translate_and_sub() {
        let w = WindowConfig::from_fn(Region::new(iv![0, 0], iv![2, 2]).unwrap(), |p| {
            Ok(BigInt::from(p[0] * 10 + p[1]))
        })
        .unwrap();
        let t = w.translate(&iv![1, 1]);
        assert_eq!(t.region(), &Region::new(iv![1, 1], iv![3, 3]).unwrap());
        assert_eq!(t.get(&iv![3, 2]).unwrap(), w.get(&iv![2, 1]).unwrap());
        let s = w.sub_window(&Region::new(iv![1, 1], iv![2, 2]).unwrap()).unwrap();
        assert_eq!(s.values(), &[11, 12, 21, 22].map(BigInt::from));
        assert!(w.get(&iv![3, 0]).is_err());
        assert!(w.sub_window(&Region::new(iv![1, 1], iv![3, 3]).unwrap()).is_err());
    }
}
