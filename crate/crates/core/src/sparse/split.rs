use std::sync::Arc;

use super::{as_fiber_sum, fiber_extract, fiber_limit, stabilized_translate_limit};
use crate::config::{ConfigView, FiberSum};
use crate::decompose::{search_difference_annihilator, Bounds};
use crate::error::{Error, Result};
use crate::eval::Eval;
use crate::lattice::parallel;
use crate::laurent::LaurentPoly;
use crate::vector::IntVector;

fn apply(f: &LaurentPoly, s: &FiberSum) -> Result<FiberSum> {
    match ConfigView::Fibers(s.clone()).apply_poly(f)? {
        ConfigView::Fibers(out) => Ok(out),
        _ => unreachable!("polynomials map fiber sums to fiber sums"),
    }
}

fn direction(f: &LaurentPoly) -> Result<IntVector> {
    Ok(f.line_direction().ok_or(Error::NotLinePolynomial)?.direction)
}

fn identity(holds: bool, what: &str) -> Result<()> {
    if holds {
        Ok(())
    } else {
        Err(Error::Verification(format!("identity {what} does not hold")))
    }
}

/// Limit of the translates of `s` by multiples of `step`, computed in
/// closed form and cross-checked on the evidence window. Far-away fibers
/// can push the cross-check past the translate budget; the closed form
/// stands on its own then, since callers verify every identity exactly.
fn limit(s: &FiberSum, step: &IntVector, bounds: &Bounds) -> Result<FiberSum> {
    let (lim, _) = fiber_limit(s, step)?;
    match stabilized_translate_limit(
        &ConfigView::Fibers(s.clone()),
        step,
        &bounds.check_region(s.dim()),
        bounds.k_max,
        bounds.patience,
    ) {
        Err(e) if e.is_inconclusive() => {}
        other => {
            other?;
        }
    }
    Ok(lim)
}

fn period(s: &FiberSum, dir: &IntVector) -> Result<i64> {
    s.period_along(dir)?
        .ok_or_else(|| Error::Internal(format!("fiber sum is not periodic along {dir}")))
}

/// Splits a sparse `c` annihilated by `φψ` (line polynomials in
/// non-parallel directions `v`, `u`) as `c1 + c2` with `c1` a sum of
/// periodic `v`-fibers, `φc1 = 0`, and `c2` likewise for `u` and `ψ`.
///
/// `c1` and `c2` are limits of translates of `c` along the periods of
/// `ψc` and `φc`. Every identity the construction relies on is checked
/// exactly before returning.
pub fn sparse_split2(
    c: &ConfigView,
    phi: &LaurentPoly,
    psi: &LaurentPoly,
    bounds: &Bounds,
) -> Result<(FiberSum, FiberSum)> {
    let s = as_fiber_sum(c)?;
    Error::check_dim(s.dim(), phi.dim())?;
    Error::check_dim(s.dim(), psi.dim())?;
    let (v, u) = (direction(phi)?, direction(psi)?);
    if parallel(&v, &u) {
        return Err(Error::ParallelDirections(v, u));
    }
    let e1 = apply(psi, &s)?;
    let e2 = apply(phi, &s)?;
    if !apply(phi, &e1)?.is_empty() {
        return Err(Error::Precondition(format!("{phi} * {psi} does not annihilate the input")));
    }
    let e1 = fiber_extract(&ConfigView::Fibers(e1), &v, bounds.period)?.fibers;
    let e2 = fiber_extract(&ConfigView::Fibers(e2), &u, bounds.period)?.fibers;
    let c1 = limit(&s, &v.scale(period(&e1, &v)?), bounds)?;
    let c2 = limit(&s, &u.scale(period(&e2, &u)?), bounds)?;
    identity(apply(phi, &c1)?.is_empty(), "φ c1 = 0")?;
    identity(apply(psi, &c1)? == e1, "ψ c1 = ψ c")?;
    identity(apply(psi, &c2)?.is_empty(), "ψ c2 = 0")?;
    identity(apply(phi, &c2)? == e2, "φ c2 = φ c")?;
    identity(s.sub(&c1)?.sub(&c2)?.is_empty(), "c = c1 + c2")?;
    Ok((
        fiber_extract(&ConfigView::Fibers(c1), &v, bounds.period)?.fibers,
        fiber_extract(&ConfigView::Fibers(c2), &u, bounds.period)?.fibers,
    ))
}

/// Splits a sparse `c` annihilated by `φ_1 ··· φ_n` (line polynomials in
/// pairwise non-parallel directions) into `n` fiber sums, the `i`-th made
/// of periodic fibers along `v_i` and annihilated by `φ_i`.
pub fn sparse_decompose(c: &ConfigView, phis: &[LaurentPoly], bounds: &Bounds) -> Result<Vec<FiberSum>> {
    let s = as_fiber_sum(c)?;
    if phis.is_empty() {
        return Err(Error::Invalid("need at least one line polynomial".into()));
    }
    let mut dirs = Vec::with_capacity(phis.len());
    for phi in phis {
        Error::check_dim(s.dim(), phi.dim())?;
        dirs.push(direction(phi)?);
    }
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            if dirs[i] == dirs[j] {
                return Err(Error::ParallelDirections(dirs[i].clone(), dirs[j].clone()));
            }
        }
    }
    let mut rest = s.clone();
    for phi in phis {
        rest = apply(phi, &rest)?;
    }
    if !rest.is_empty() {
        return Err(Error::Precondition(
            "the product of the line polynomials does not annihilate the input".into(),
        ));
    }
    let parts = induct(&s, phis, &dirs, bounds)?;
    let mut total = FiberSum::empty(s.dim());
    for part in &parts {
        total = total.add(part)?;
    }
    identity(total == s, "Σ c_i = c")?;
    Ok(parts)
}

fn induct(s: &FiberSum, phis: &[LaurentPoly], dirs: &[IntVector], bounds: &Bounds) -> Result<Vec<FiberSum>> {
    let n = phis.len();
    let (phi_n, v_n) = (&phis[n - 1], &dirs[n - 1]);
    if n == 1 {
        identity(apply(phi_n, s)?.is_empty(), "φ_1 c = 0")?;
        return Ok(vec![fiber_extract(&ConfigView::Fibers(s.clone()), v_n, bounds.period)?.fibers]);
    }
    let image = apply(phi_n, s)?;
    let primes = induct(&image, &phis[..n - 1], &dirs[..n - 1], bounds)
        .map_err(|e| e.context(format!("level {}", n - 1)))?;
    let mut parts = Vec::with_capacity(n);
    for (i, prime) in primes.iter().enumerate() {
        let step = dirs[i].scale(period(prime, &dirs[i])?);
        let e = limit(s, &step, bounds)?;
        identity(&apply(phi_n, &e)? == prime, "φ_n e = c'_i")?;
        let (e_i, _) = sparse_split2(&ConfigView::Fibers(e), &phis[i], phi_n, bounds)
            .map_err(|err| err.context(format!("level {n}, factor {}", i + 1)))?;
        identity(&apply(phi_n, &e_i)? == prime, "φ_n c_i = c'_i")?;
        parts.push(e_i);
    }
    let mut last = s.clone();
    for p in &parts {
        last = last.sub(p)?;
    }
    identity(apply(phi_n, &last)?.is_empty(), "φ_n c_n = 0")?;
    parts.push(fiber_extract(&ConfigView::Fibers(last), v_n, bounds.period)?.fibers);
    Ok(parts)
}

/// A sparse configuration with an annihilator `f` as a sum of periodic
/// fiber families, one per factor of the difference product found from
/// `f`. Zero gives no families.
pub fn sparse_full(c: &ConfigView, f: &LaurentPoly, bounds: &Bounds) -> Result<Vec<FiberSum>> {
    let s = as_fiber_sum(c)?;
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let e: Eval = Arc::new(ConfigView::Fibers(s.clone()));
    let dp = search_difference_annihilator(&e, f, bounds.search, &bounds.check_region(s.dim()))?;
    sparse_decompose(&ConfigView::Fibers(s), &dp.factors()?, bounds)
}
