//! Sparse configurations: support counts in cubes `C_m + t` bounded by
//! `a·m`. With an annihilator such a configuration is a finite sum of
//! periodic fibers, which is what [`sparse_full`] recovers.

mod extract;
mod limit;
mod split;

pub use extract::{fiber_extract, FiberExtraction};
pub use limit::{fiber_limit, stabilized_translate_limit};
pub use split::{sparse_decompose, sparse_full, sparse_split2};

use num_traits::Zero;

use crate::config::{line_crossing, ConfigView, FiberSum, PeriodicFiber, Region};
use crate::error::{Error, Result};
use crate::vector::IntVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsenessCertificate {
    pub constant_a: u64,
    /// `(m, largest support count seen in a cube C_m + t)`.
    pub checked_ranges: Vec<(u64, u64)>,
    /// True when `a` is proven for every `m` and `t`, not just the ones tried.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SparsenessCheck {
    Certified(SparsenessCertificate),
    Violated { m: u64, t: IntVector, count: u64 },
}

impl SparsenessCheck {
    pub fn certified(&self) -> bool {
        matches!(self, SparsenessCheck::Certified(_))
    }

    pub fn certificate(&self) -> Option<&SparsenessCertificate> {
        match self {
            SparsenessCheck::Certified(c) => Some(c),
            SparsenessCheck::Violated { .. } => None,
        }
    }
}

fn cube(dim: usize, m: u64, t: &IntVector) -> Region {
    Region::centered(dim, m as i64).translate(t)
}

fn count_support(c: &ConfigView, region: &Region) -> Result<u64> {
    let mut n = 0;
    for x in region.points() {
        if !c.evaluate(&x)?.is_zero() {
            n += 1;
        }
    }
    Ok(n)
}

/// Translates worth testing for a fiber sum: one period of every fiber
/// and every crossing of two fibers.
fn fiber_centers(s: &FiberSum) -> Vec<IntVector> {
    let mut out: Vec<IntVector> = Vec::new();
    for f in s.fibers() {
        out.extend((0..f.period() as i64).map(|j| f.point(j)));
    }
    let fibers: &[PeriodicFiber] = s.fibers();
    for (i, a) in fibers.iter().enumerate() {
        for b in &fibers[i + 1..] {
            out.extend(line_crossing(a, b));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Tests `|supp(c) ∩ (C_m + t)| <= a·m` for `m <= m_max`.
///
/// Fiber sums with `a` at least their closed-form constant are certified
/// outright. Periodic inputs are reduced to one translate per residue of
/// the period lattice, windows to the cubes that fit inside them; both
/// only give evidence for the tested `m`. A violation is returned as data.
pub fn check_sparseness(c: &ConfigView, a: u64, m_max: u64) -> Result<SparsenessCheck> {
    if a == 0 || m_max == 0 {
        return Err(Error::Invalid("a and m_max must be positive".into()));
    }
    let d = c.dim();
    let (centers, proven): (Vec<IntVector>, bool) = match c {
        ConfigView::Fibers(s) => (fiber_centers(s), a >= s.sparseness_constant()),
        ConfigView::Periodic(p) => (p.lattice().residues(), p.is_zero()),
        ConfigView::Window(_) => (Vec::new(), false),
    };
    let mut checked = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let translates: Vec<IntVector> = match c {
            ConfigView::Window(w) => {
                let r = m as i64;
                let lo = &w.region().lo + &IntVector::new(vec![r; d]);
                let hi = &w.region().hi - &IntVector::new(vec![r; d]);
                match Region::new(lo, hi) {
                    Ok(inner) => inner.points().collect(),
                    Err(_) => break,
                }
            }
            _ => centers.clone(),
        };
        let mut max = 0;
        for t in &translates {
            let count = count_support(c, &cube(d, m, t))?;
            if count > a * m {
                return Ok(SparsenessCheck::Violated {
                    m,
                    t: t.clone(),
                    count,
                });
            }
            max = max.max(count);
        }
        checked.push((m, max));
    }
    Ok(SparsenessCheck::Certified(SparsenessCertificate {
        constant_a: a,
        checked_ranges: checked,
        exact: proven,
    }))
}

/// The fiber-sum form of a sparse configuration, where one exists exactly:
/// fiber sums as they are, the zero periodic configuration, and periodic
/// configurations in dimension one.
pub fn as_fiber_sum(c: &ConfigView) -> Result<FiberSum> {
    match c {
        ConfigView::Fibers(s) => Ok(s.clone()),
        ConfigView::Periodic(p) if p.is_zero() => Ok(FiberSum::empty(p.dim())),
        ConfigView::Periodic(p) if p.dim() == 1 => {
            let n = p.lattice().index().expect("full rank") as i64;
            let vals = (0..n).map(|j| p.value(&IntVector::new(vec![j])).clone()).collect();
            Ok(FiberSum::single(PeriodicFiber::new(
                IntVector::zero(1),
                IntVector::unit(1, 0),
                vals,
            )?))
        }
        ConfigView::Periodic(_) => Err(Error::Precondition(
            "a nonzero periodic configuration in dimension >= 2 is not sparse".into(),
        )),
        ConfigView::Window(_) => Err(Error::Precondition(
            "translate limits need an unbounded domain; pass a fiber sum".into(),
        )),
    }
}
