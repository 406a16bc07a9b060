//! Finite representations of integer-valued functions on `Z^d` and the
//! convolution action of Laurent polynomials on them.

mod fiber;
mod periodic;
mod window;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

pub use fiber::{FiberSum, PeriodicFiber};
pub use periodic::PeriodicConfig;
pub use window::{Region, RegionPoints, WindowConfig};

use crate::error::{Error, Result};
use crate::lattice::IntLattice;
use crate::laurent::LaurentPoly;
use crate::vector::IntVector;

/// Outcome of a check. Window verdicts say nothing outside `region`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Exact(bool),
    WindowOnly { holds: bool, region: Region },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        match self {
            Verdict::Exact(b) => *b,
            Verdict::WindowOnly { holds, .. } => *holds,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Verdict::Exact(_))
    }

    /// Conjunction; the result is exact only if both sides are.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Exact(a), Verdict::Exact(b)) => Verdict::Exact(a && b),
            (Verdict::WindowOnly { holds, region }, v) | (v, Verdict::WindowOnly { holds, region }) => {
                Verdict::WindowOnly {
                    holds: holds && v.holds(),
                    region,
                }
            }
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Exact(b) => write!(f, "exact {b}"),
            Verdict::WindowOnly { holds, region } => write!(f, "{holds} on window {region}"),
        }
    }
}

/// One of the three finite representations of a configuration.
#[derive(Clone, PartialEq, Eq)]
pub enum ConfigView {
    Window(WindowConfig),
    Periodic(PeriodicConfig),
    Fibers(FiberSum),
}

impl From<WindowConfig> for ConfigView {
    fn from(w: WindowConfig) -> Self {
        ConfigView::Window(w)
    }
}

impl From<PeriodicConfig> for ConfigView {
    fn from(p: PeriodicConfig) -> Self {
        ConfigView::Periodic(p)
    }
}

impl From<FiberSum> for ConfigView {
    fn from(f: FiberSum) -> Self {
        ConfigView::Fibers(f)
    }
}

impl ConfigView {
    pub fn dim(&self) -> usize {
        match self {
            ConfigView::Window(w) => w.dim(),
            ConfigView::Periodic(p) => p.dim(),
            ConfigView::Fibers(s) => s.dim(),
        }
    }

    /// The evaluation domain; `None` means all of `Z^d`.
    pub fn domain(&self) -> Option<&Region> {
        match self {
            ConfigView::Window(w) => Some(w.region()),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConfigView::Window(_) => "window",
            ConfigView::Periodic(_) => "periodic",
            ConfigView::Fibers(_) => "fibersum",
        }
    }

    pub fn evaluate(&self, x: &IntVector) -> Result<BigInt> {
        Error::check_dim(self.dim(), x.dim())?;
        match self {
            ConfigView::Window(w) => w.get(x).cloned(),
            ConfigView::Periodic(p) => Ok(p.value(x).clone()),
            ConfigView::Fibers(s) => Ok(s.value(x)),
        }
    }

    /// `τ^t c`, i.e. `x ↦ c(x - t)`.
    pub fn translate(&self, t: &IntVector) -> Result<ConfigView> {
        Error::check_dim(self.dim(), t.dim())?;
        Ok(match self {
            ConfigView::Window(w) => ConfigView::Window(w.translate(t)),
            ConfigView::Periodic(p) => ConfigView::Periodic(p.translate(t)),
            ConfigView::Fibers(s) => ConfigView::Fibers(s.translate(t)),
        })
    }

    /// `(fc)(u) = Σ f_i c(u - u_i)`. Windows shrink to the points whose
    /// whole stencil lies inside the input box.
    pub fn apply_poly(&self, f: &LaurentPoly) -> Result<ConfigView> {
        Error::check_dim(self.dim(), f.dim())?;
        match self {
            ConfigView::Window(w) => {
                let support = f.support();
                let region = w.region().erode(&support).ok_or(Error::EmptyErosion)?;
                let pts: Vec<IntVector> = region.points().collect();
                let values = pts
                    .par_iter()
                    .map(|u| {
                        let mut acc = BigInt::zero();
                        for (e, k) in f.terms() {
                            acc += k * w.get(&(u - e))?;
                        }
                        Ok(acc)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConfigView::Window(WindowConfig::new(region.lo, region.hi, values)?))
            }
            ConfigView::Periodic(p) => {
                let out = PeriodicConfig::from_fn(p.declared_basis().to_vec(), |r| {
                    f.terms().map(|(e, k)| k * p.value(&(r - e))).sum()
                })?;
                Ok(ConfigView::Periodic(out))
            }
            ConfigView::Fibers(s) => {
                let mut fibers = Vec::new();
                for (e, k) in f.terms() {
                    fibers.extend(s.translate(e).scale(k).fibers().iter().cloned());
                }
                Ok(ConfigView::Fibers(FiberSum::new(s.dim(), fibers)?))
            }
        }
    }

    /// Whether `fc = 0`. Exact for periodic and fiber inputs: a nonempty
    /// canonical fiber sum is never identically zero, since a fiber of
    /// another direction meets its line in at most one point.
    pub fn is_annihilated(&self, f: &LaurentPoly) -> Result<Verdict> {
        let fc = self.apply_poly(f)?;
        Ok(match fc {
            ConfigView::Window(w) => Verdict::WindowOnly {
                holds: w.is_zero(),
                region: w.region().clone(),
            },
            ConfigView::Periodic(p) => Verdict::Exact(p.is_zero()),
            ConfigView::Fibers(s) => Verdict::Exact(s.is_empty()),
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ConfigView::Window(w) => w.is_zero(),
            ConfigView::Periodic(p) => p.is_zero(),
            ConfigView::Fibers(s) => s.is_empty(),
        }
    }

    pub fn rasterize(&self, region: &Region) -> Result<WindowConfig> {
        Error::check_dim(self.dim(), region.dim())?;
        if let ConfigView::Window(w) = self {
            return w.sub_window(region);
        }
        let pts: Vec<IntVector> = region.points().collect();
        let values = pts
            .par_iter()
            .map(|x| self.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        WindowConfig::new(region.lo.clone(), region.hi.clone(), values)
    }

    /// Every value lies in `allowed`; exact for structured inputs.
    pub fn values_within(&self, allowed: &[BigInt]) -> bool {
        let ok = |v: &BigInt| allowed.contains(v);
        match self {
            ConfigView::Window(w) => w.values().iter().all(ok),
            ConfigView::Periodic(p) => p.values().values().all(ok),
            ConfigView::Fibers(s) => {
                ok(&BigInt::zero())
                    && s.fibers().iter().all(|f| {
                        // Crossing points sum several fibers; check them too.
                        f.vals().iter().all(ok)
                    })
                    && crossings_within(s, allowed)
            }
        }
    }
}

fn crossings_within(s: &FiberSum, allowed: &[BigInt]) -> bool {
    let fibers = s.fibers();
    for (i, a) in fibers.iter().enumerate() {
        for b in &fibers[i + 1..] {
            if a.direction() == b.direction() {
                continue;
            }
            if let Some(x) = line_crossing(a, b) {
                if !allowed.contains(&s.value(&x)) {
                    return false;
                }
            }
        }
    }
    true
}

/// The common point of two non-parallel fiber lines, if it is integral.
pub(crate) fn line_crossing(a: &PeriodicFiber, b: &PeriodicFiber) -> Option<IntVector> {
    use crate::lattice::{ratv, solve_in_span};
    use num_rational::BigRational;
    // a.anchor + s·a.dir = b.anchor + t·b.dir.
    let diff = b.anchor() - a.anchor();
    let neg_b: IntVector = -b.direction();
    let sol = solve_in_span(&[ratv(a.direction()), ratv(&neg_b)], &ratv(&diff))?;
    let s: &BigRational = &sol[0];
    if !s.is_integer() {
        return None;
    }
    let s = i64::try_from(s.to_integer()).ok()?;
    let x = a.point(s);
    (b.position(&x).is_some()).then_some(x)
}

/// `Σ k_i c_i`. Fiber sums stay fiber sums, periodic configurations move to
/// the intersection of their lattices, anything with a window becomes a
/// window on the common domain.
pub fn add_views(terms: &[(BigInt, &ConfigView)]) -> Result<ConfigView> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Invalid("empty linear combination".into()))?;
    let dim = first.1.dim();
    for (_, c) in terms {
        Error::check_dim(dim, c.dim())?;
    }
    if terms.iter().all(|(_, c)| matches!(c, ConfigView::Fibers(_))) {
        let mut acc = FiberSum::empty(dim);
        for (k, c) in terms {
            if let ConfigView::Fibers(s) = c {
                acc = acc.add(&s.scale(k))?;
            }
        }
        return Ok(ConfigView::Fibers(acc));
    }
    if terms.iter().all(|(_, c)| matches!(c, ConfigView::Periodic(_))) {
        let mut lattice: Option<IntLattice> = None;
        for (_, c) in terms {
            if let ConfigView::Periodic(p) = c {
                lattice = Some(match lattice {
                    None => p.lattice().clone(),
                    Some(l) => l.intersect(p.lattice())?,
                });
            }
        }
        let lattice = lattice.expect("nonempty");
        let out = PeriodicConfig::from_fn(lattice.basis().to_vec(), |r| {
            terms
                .iter()
                .map(|(k, c)| match c {
                    ConfigView::Periodic(p) => k * p.value(r),
                    _ => unreachable!(),
                })
                .sum()
        })?;
        return Ok(ConfigView::Periodic(out));
    }
    let mut region: Option<Region> = None;
    for (_, c) in terms {
        if let Some(d) = c.domain() {
            region = Some(match region {
                None => d.clone(),
                Some(r) => r.intersect(d).ok_or(Error::EmptyDomain)?,
            });
        }
    }
    let region = region.ok_or(Error::UnboundedMixedSum)?;
    let pts: Vec<IntVector> = region.points().collect();
    let values = pts
        .par_iter()
        .map(|x| {
            terms.iter().try_fold(BigInt::zero(), |acc, (k, c)| {
                Ok::<_, Error>(acc + k * c.evaluate(x)?)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfigView::Window(WindowConfig::new(
        region.lo,
        region.hi,
        values,
    )?))
}

/// `c1 - c2` through [`add_views`].
pub fn difference_views(a: &ConfigView, b: &ConfigView) -> Result<ConfigView> {
    add_views(&[(BigInt::one(), a), (-BigInt::one(), b)])
}

impl fmt::Debug for ConfigView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigView::Window(w) => w.fmt(f),
            ConfigView::Periodic(p) => p.fmt(f),
            ConfigView::Fibers(s) => write!(f, "FiberSum{s:?}"),
        }
    }
}
