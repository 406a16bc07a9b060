use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{lcm, primitive};
use crate::vector::IntVector;

/// A periodic function supported on the line `anchor + Z·direction`:
/// the value at `anchor + j·direction` is `vals[j mod p]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicFiber {
    direction: IntVector,
    anchor: IntVector,
    vals: Vec<BigInt>,
}

fn first_nonzero(v: &IntVector) -> usize {
    v.iter().position(|&x| x != 0).expect("nonzero direction")
}

/// Smallest `p` dividing `vals.len()` with `vals` invariant under rotation by `p`.
pub(crate) fn minimal_period(vals: &[BigInt]) -> usize {
    let n = vals.len();
    (1..=n)
        .filter(|p| n.is_multiple_of(*p))
        .find(|&p| (0..n).all(|j| vals[j] == vals[(j + p) % n]))
        .unwrap_or(n)
}

impl PeriodicFiber {
    /// Canonicalizes the anchor and shortens `vals` to its minimal period.
    /// `direction` must already be primitive and sign-normalized.
    pub fn new(anchor: IntVector, direction: IntVector, vals: Vec<BigInt>) -> Result<Self> {
        Error::check_dim(anchor.dim(), direction.dim())?;
        if primitive(&direction)? != direction {
            return Err(Error::Invalid(format!(
                "fiber direction {direction} is not primitive and sign-normalized"
            )));
        }
        if vals.is_empty() || vals.iter().all(Zero::is_zero) {
            return Err(Error::Invalid("fiber values are all zero".into()));
        }
        let i = first_nonzero(&direction);
        let q = Integer::div_floor(&anchor[i], &direction[i]);
        let anchor = &anchor - &direction.scale(q);
        let p = vals.len() as i64;
        // Old position j becomes new position j + q.
        let rotated: Vec<BigInt> = (0..p)
            .map(|j| vals[(j - q).rem_euclid(p) as usize].clone())
            .collect();
        let m = minimal_period(&rotated);
        let mut vals = rotated;
        vals.truncate(m);
        Ok(PeriodicFiber {
            direction,
            anchor,
            vals,
        })
    }

    pub fn anchor(&self) -> &IntVector {
        &self.anchor
    }

    pub fn direction(&self) -> &IntVector {
        &self.direction
    }

    pub fn period(&self) -> usize {
        self.vals.len()
    }

    pub fn vals(&self) -> &[BigInt] {
        &self.vals
    }

    /// Canonical key of the carrying line.
    pub fn line_key(&self) -> (&IntVector, &IntVector) {
        (&self.direction, &self.anchor)
    }

    /// Line position `j` of `x`, or `None` off the line.
    pub fn position(&self, x: &IntVector) -> Option<i64> {
        let diff = x - &self.anchor;
        let i = first_nonzero(&self.direction);
        if diff[i] % self.direction[i] != 0 {
            return None;
        }
        let j = diff[i] / self.direction[i];
        (diff == self.direction.scale(j)).then_some(j)
    }

    pub fn value(&self, x: &IntVector) -> BigInt {
        match self.position(x) {
            Some(j) => self.vals[j.rem_euclid(self.vals.len() as i64) as usize].clone(),
            None => BigInt::zero(),
        }
    }

    pub fn value_at_position(&self, j: i64) -> &BigInt {
        &self.vals[j.rem_euclid(self.vals.len() as i64) as usize]
    }

    pub fn point(&self, j: i64) -> IntVector {
        &self.anchor + &self.direction.scale(j)
    }

    pub fn translate(&self, t: &IntVector) -> PeriodicFiber {
        PeriodicFiber::new(&self.anchor + t, self.direction.clone(), self.vals.clone())
            .expect("translation keeps fiber invariants")
    }

    pub fn scale(&self, k: &BigInt) -> Option<PeriodicFiber> {
        if k.is_zero() {
            return None;
        }
        Some(PeriodicFiber {
            direction: self.direction.clone(),
            anchor: self.anchor.clone(),
            vals: self.vals.iter().map(|v| v * k).collect(),
        })
    }
}

impl fmt::Debug for PeriodicFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Fiber({} + Z{}, {:?})",
            self.anchor, self.direction, self.vals
        )
    }
}

/// A finite sum of periodic fibers with at most one fiber per line.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiberSum {
    dim: usize,
    fibers: Vec<PeriodicFiber>,
}

impl FiberSum {
    pub fn empty(dim: usize) -> Self {
        FiberSum {
            dim,
            fibers: Vec::new(),
        }
    }

    /// Merges fibers on a common line (period = lcm, values summed) and
    /// drops those that cancel.
    pub fn new(dim: usize, fibers: Vec<PeriodicFiber>) -> Result<Self> {
        let mut groups: BTreeMap<(IntVector, IntVector), Vec<PeriodicFiber>> = BTreeMap::new();
        for f in fibers {
            Error::check_dim(dim, f.anchor.dim())?;
            groups
                .entry((f.direction.clone(), f.anchor.clone()))
                .or_default()
                .push(f);
        }
        let mut out = Vec::with_capacity(groups.len());
        for ((direction, anchor), group) in groups {
            if group.len() == 1 {
                out.extend(group);
                continue;
            }
            let p = group.iter().fold(1i64, |acc, f| lcm(acc, f.period() as i64));
            let vals: Vec<BigInt> = (0..p)
                .map(|j| group.iter().map(|f| f.value_at_position(j)).sum())
                .collect();
            if vals.iter().all(Zero::is_zero) {
                continue;
            }
            out.push(PeriodicFiber::new(anchor, direction, vals)?);
        }
        Ok(FiberSum { dim, fibers: out })
    }

    pub fn single(fiber: PeriodicFiber) -> Self {
        FiberSum {
            dim: fiber.anchor.dim(),
            fibers: vec![fiber],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fibers(&self) -> &[PeriodicFiber] {
        &self.fibers
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn value(&self, x: &IntVector) -> BigInt {
        self.fibers.iter().map(|f| f.value(x)).sum()
    }

    pub fn directions(&self) -> BTreeSet<IntVector> {
        self.fibers.iter().map(|f| f.direction.clone()).collect()
    }

    /// Fibers with the given (primitive) direction.
    pub fn family(&self, direction: &IntVector) -> FiberSum {
        FiberSum {
            dim: self.dim,
            fibers: self
                .fibers
                .iter()
                .filter(|f| &f.direction == direction)
                .cloned()
                .collect(),
        }
    }

    pub fn translate(&self, t: &IntVector) -> FiberSum {
        let fibers = self.fibers.iter().map(|f| f.translate(t)).collect();
        // Translation is a bijection on lines, so no merging can occur.
        let mut s = FiberSum {
            dim: self.dim,
            fibers,
        };
        s.fibers.sort();
        s
    }

    pub fn scale(&self, k: &BigInt) -> FiberSum {
        FiberSum {
            dim: self.dim,
            fibers: self.fibers.iter().filter_map(|f| f.scale(k)).collect(),
        }
    }

    pub fn add(&self, other: &FiberSum) -> Result<FiberSum> {
        Error::check_dim(self.dim, other.dim)?;
        let mut all = self.fibers.clone();
        all.extend(other.fibers.iter().cloned());
        FiberSum::new(self.dim, all)
    }

    pub fn sub(&self, other: &FiberSum) -> Result<FiberSum> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    /// Smallest `p > 0` such that shifting by `p·direction` is a symmetry,
    /// where `direction` may be any nonzero vector. `None` if there is none.
    pub fn period_along(&self, direction: &IntVector) -> Result<Option<i64>> {
        let prim = primitive(direction)?;
        let i = first_nonzero(&prim);
        let s = (direction[i] / prim[i]).abs();
        let mut l = 1i64;
        for f in &self.fibers {
            if f.direction != prim {
                return Ok(None);
            }
            l = lcm(l, f.period() as i64);
        }
        Ok(Some(l / l.gcd(&s)))
    }

    /// Closed-form sparseness constant: each fiber meets any cube `C_m + t`
    /// in at most `2m + 1 <= 3m` points.
    pub fn sparseness_constant(&self) -> u64 {
        (3 * self.fibers.len() as u64).max(1)
    }
}

impl fmt::Debug for FiberSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.fibers).finish()
    }
}
