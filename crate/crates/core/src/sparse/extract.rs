use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::as_fiber_sum;
use crate::config::{ConfigView, FiberSum, PeriodicFiber, WindowConfig};
use crate::error::{Error, Result};
use crate::lattice::primitive;
use crate::vector::IntVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberExtraction {
    pub fibers: FiberSum,
    /// False when periods were read off a window and are only consistent
    /// with what the window shows.
    pub exact: bool,
}

/// Writes a configuration that is periodic in direction `v` as a sum of
/// periodic fibers along `v`, each with its minimal period.
pub fn fiber_extract(c: &ConfigView, v: &IntVector, period_bound: u64) -> Result<FiberExtraction> {
    Error::check_dim(c.dim(), v.dim())?;
    let dir = primitive(v)?;
    if let ConfigView::Window(w) = c {
        return extract_window(w, &dir, period_bound);
    }
    let s = as_fiber_sum(c)?;
    for f in s.fibers() {
        if f.direction() != &dir {
            return Err(Error::Precondition(format!(
                "fiber on {} + Z{} is not along {dir}",
                f.anchor(),
                f.direction()
            )));
        }
        if f.period() as u64 > period_bound {
            return Err(Error::Inconclusive {
                what: format!("period {} of the line {} + Z{dir}", f.period(), f.anchor()),
                bound: period_bound,
            });
        }
    }
    Ok(FiberExtraction {
        fibers: s,
        exact: true,
    })
}

/// Canonical anchor of the line through `x` and the position of `x` on it.
fn line_of(x: &IntVector, dir: &IntVector) -> (IntVector, i64) {
    let i = dir.iter().position(|&a| a != 0).expect("nonzero direction");
    let q = Integer::div_floor(&x[i], &dir[i]);
    (x - &dir.scale(q), q)
}

fn extract_window(w: &WindowConfig, dir: &IntVector, period_bound: u64) -> Result<FiberExtraction> {
    let region = w.region();
    let mut lines: BTreeMap<IntVector, i64> = BTreeMap::new();
    for (x, val) in region.points().zip(w.values()) {
        if !val.is_zero() {
            let (anchor, j) = line_of(&x, dir);
            lines.entry(anchor).or_insert(j);
        }
    }
    let mut fibers = Vec::with_capacity(lines.len());
    for (anchor, j0) in lines {
        let inside = |j: i64| region.contains(&(&anchor + &dir.scale(j)));
        let mut lo = j0;
        while inside(lo - 1) {
            lo -= 1;
        }
        let mut hi = j0;
        while inside(hi + 1) {
            hi += 1;
        }
        let seg: Vec<BigInt> = (lo..=hi)
            .map(|j| w.get(&(&anchor + &dir.scale(j))).cloned())
            .collect::<Result<_>>()?;
        let p = segment_period(&seg, period_bound).map_err(|e| {
            e.context(format!("line {anchor} + Z{dir}"))
        })?;
        fibers.push(PeriodicFiber::new(
            &anchor + &dir.scale(lo),
            dir.clone(),
            seg[..p].to_vec(),
        )?);
    }
    Ok(FiberExtraction {
        fibers: FiberSum::new(w.dim(), fibers)?,
        exact: false,
    })
}

/// Least `p` with `seg[j] = seg[j + p]` throughout, requiring every
/// residue to be seen at least twice.
fn segment_period(seg: &[BigInt], bound: u64) -> Result<usize> {
    let n = seg.len();
    let cap = (bound as usize).min(n / 2);
    for p in 1..=cap {
        if (0..n - p).all(|j| seg[j] == seg[j + p]) {
            return Ok(p);
        }
    }
    if (bound as usize) <= n / 2 {
        Err(Error::Precondition(format!(
            "values along the line have no period <= {bound}"
        )))
    } else {
        Err(Error::Inconclusive {
            what: format!("window shows only {n} points of the line"),
            bound,
        })
    }
}
