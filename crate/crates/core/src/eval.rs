//! Functions on `Z^d` given only by a way to compute their values.
//!
//! Decomposition components are in general not configurations (their
//! values can grow without bound), so they are exposed through
//! [`Evaluator`] and turned into finite data by rasterizing.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::config::{add_views, ConfigView, Region, Verdict, WindowConfig};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::vector::IntVector;

/// A deterministic function `Z^d -> Q`, possibly defined only on a box.
pub trait Evaluator: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn eval(&self, x: &IntVector) -> Result<BigRational>;

    /// `None` means every point may be queried.
    fn domain(&self) -> Option<Region> {
        None
    }

    /// The finite representation, when there is one. Exact checks use it.
    fn as_config(&self) -> Option<&ConfigView> {
        None
    }
}

pub type Eval = Arc<dyn Evaluator>;

impl Evaluator for ConfigView {
    fn dim(&self) -> usize {
        ConfigView::dim(self)
    }

    fn eval(&self, x: &IntVector) -> Result<BigRational> {
        self.evaluate(x).map(BigRational::from_integer)
    }

    fn domain(&self) -> Option<Region> {
        ConfigView::domain(self).cloned()
    }

    fn as_config(&self) -> Option<&ConfigView> {
        Some(self)
    }
}

pub fn from_config(c: ConfigView) -> Eval {
    Arc::new(c)
}

/// `f·e` computed pointwise.
#[derive(Debug)]
pub struct PolyAction {
    f: LaurentPoly,
    inner: Eval,
}

impl Evaluator for PolyAction {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &IntVector) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (e, k) in self.f.terms() {
            acc += self.inner.eval(&(x - e))? * BigRational::from_integer(k.clone());
        }
        Ok(acc)
    }

    fn domain(&self) -> Option<Region> {
        // An empty erosion would already have been rejected by `act`.
        self.inner
            .domain()
            .and_then(|r| r.erode(&self.f.support()))
    }
}

/// `Σ k_i e_i` computed pointwise.
#[derive(Debug)]
pub struct Combination {
    terms: Vec<(BigRational, Eval)>,
}

impl Evaluator for Combination {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    fn eval(&self, x: &IntVector) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (k, e) in &self.terms {
            acc += e.eval(x)? * k;
        }
        Ok(acc)
    }

    fn domain(&self) -> Option<Region> {
        let mut out: Option<Region> = None;
        for (_, e) in &self.terms {
            if let Some(d) = e.domain() {
                out = Some(match out {
                    None => d,
                    Some(r) => r.intersect(&d)?,
                });
            }
        }
        out
    }
}

type IntFn = dyn Fn(&IntVector) -> BigInt + Send + Sync;

/// An integer-valued closure, e.g. a configuration too large to tabulate.
pub struct FnEvaluator {
    dim: usize,
    label: String,
    f: Arc<IntFn>,
}

impl FnEvaluator {
    pub fn new<F>(dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&IntVector) -> BigInt + Send + Sync + 'static,
    {
        FnEvaluator {
            dim,
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn shared<F>(dim: usize, label: impl Into<String>, f: F) -> Eval
    where
        F: Fn(&IntVector) -> BigInt + Send + Sync + 'static,
    {
        Arc::new(Self::new(dim, label, f))
    }
}

impl fmt::Debug for FnEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnEvaluator({})", self.label)
    }
}

impl Evaluator for FnEvaluator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &IntVector) -> Result<BigRational> {
        Error::check_dim(self.dim, x.dim())?;
        Ok(BigRational::from_integer((self.f)(x)))
    }
}

/// `f·e`, kept structured whenever `e` is.
pub fn act(f: &LaurentPoly, e: &Eval) -> Result<Eval> {
    Error::check_dim(e.dim(), f.dim())?;
    if let Some(c) = e.as_config() {
        return Ok(Arc::new(c.apply_poly(f)?));
    }
    if let Some(d) = e.domain() {
        d.erode(&f.support()).ok_or(Error::EmptyErosion)?;
    }
    Ok(Arc::new(PolyAction {
        f: f.clone(),
        inner: e.clone(),
    }))
}

/// `Σ k_i e_i`, kept structured when every term is a configuration and
/// the sum has a finite representation.
pub fn combine(terms: &[(BigRational, Eval)]) -> Result<Eval> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Invalid("empty linear combination".into()))?;
    for (_, e) in terms {
        Error::check_dim(first.1.dim(), e.dim())?;
    }
    let structured: Option<Vec<(BigInt, &ConfigView)>> = terms
        .iter()
        .map(|(k, e)| Some((k.is_integer().then(|| k.to_integer())?, e.as_config()?)))
        .collect();
    if let Some(s) = structured {
        match add_views(&s) {
            Ok(c) => return Ok(Arc::new(c)),
            Err(Error::UnboundedMixedSum) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Arc::new(Combination {
        terms: terms.to_vec(),
    }))
}

/// `a - b`.
pub fn subtract(a: &Eval, b: &Eval) -> Result<Eval> {
    combine(&[
        (BigRational::one(), a.clone()),
        (-BigRational::one(), b.clone()),
    ])
}

/// Values over `region` in row-major order, computed in parallel.
pub fn rasterize_rational(e: &dyn Evaluator, region: &Region) -> Result<Vec<BigRational>> {
    Error::check_dim(e.dim(), region.dim())?;
    let pts: Vec<IntVector> = region.points().collect();
    pts.par_iter().map(|x| e.eval(x)).collect()
}

/// Like [`rasterize_rational`] but insists on integer values.
pub fn rasterize(e: &dyn Evaluator, region: &Region) -> Result<WindowConfig> {
    if let Some(c) = e.as_config() {
        return c.rasterize(region);
    }
    let values = rasterize_rational(e, region)?
        .into_iter()
        .map(|v| {
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::NonInteger(v.to_string()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    WindowConfig::new(region.lo.clone(), region.hi.clone(), values)
}

/// Whether `f·e = 0`: exact for structured inputs, otherwise checked on
/// the part of `check` where `f·e` can be evaluated.
pub fn annihilates(f: &LaurentPoly, e: &Eval, check: &Region) -> Result<Verdict> {
    if let Some(c) = e.as_config() {
        return c.is_annihilated(f);
    }
    let fe = act(f, e)?;
    let region = match fe.domain() {
        Some(d) => d.intersect(check).ok_or(Error::EmptyErosion)?,
        None => check.clone(),
    };
    let holds = rasterize_rational(fe.as_ref(), &region)?
        .iter()
        .all(Zero::is_zero);
    Ok(Verdict::WindowOnly { holds, region })
}

/// Whether `v` is a period of `e` (exactly when structured).
pub fn has_period(e: &Eval, v: &IntVector, check: &Region) -> Result<Verdict> {
    annihilates(&LaurentPoly::difference(v)?, e, check)
}

/// Pointwise equality on `region`.
pub fn agree_on(a: &dyn Evaluator, b: &dyn Evaluator, region: &Region) -> Result<bool> {
    Ok(rasterize_rational(a, region)? == rasterize_rational(b, region)?)
}
