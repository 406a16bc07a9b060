use std::collections::BTreeSet;

use num_rational::BigRational;

use super::{require, DifferenceProduct};
use crate::config::{ConfigView, Region};
use crate::error::{Error, Result};
use crate::eval::{self, Eval};
use crate::lattice::{clear_denominators, nullspace, parallel, primitive, span_meets_trivially, IntLattice, SubspaceBasis};
use crate::laurent::LaurentPoly;
use crate::vector::IntVector;

/// Largest uniform multiplier tried in one shot; beyond this the
/// exponents get uncomfortably close to `i64` range.
const UNIFORM_CAP: i64 = 1 << 53;

fn lcm_upto(j: u64) -> Option<i64> {
    let mut acc: i64 = 1;
    for i in 1..=j as i64 {
        acc = acc.checked_mul(i / crate::lattice::gcd(acc, i))?;
        if acc > UNIFORM_CAP {
            return None;
        }
    }
    Some(acc)
}

fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `Π (X^{k_i d_i} - 1)` annihilates `c`? Inapplicable checks count as no.
fn kills(c: &Eval, dirs: &[IntVector], ks: &[i64], check: &Region) -> Result<bool> {
    let vs: Vec<IntVector> = dirs.iter().zip(ks).map(|(d, &k)| d.scale(k)).collect();
    let poly = LaurentPoly::difference_product(c.dim(), &vs)?;
    match eval::annihilates(&poly, c, check) {
        Ok(v) => Ok(v.holds()),
        Err(Error::EmptyErosion) | Err(Error::OutOfDomain { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Smallest-found multipliers making the product over `dirs` annihilate `c`.
fn find_multipliers(
    c: &Eval,
    dirs: &[IntVector],
    bound: u64,
    check: &Region,
) -> Result<Option<Vec<i64>>> {
    let s = dirs.len();
    let mut found: Option<i64> = None;
    let uniform = lcm_upto(bound).filter(|_| c.as_config().is_some_and(|v| v.domain().is_none()));
    if let Some(big) = uniform {
        // Every admissible choice of multipliers divides lcm(1..bound), so
        // one exact test settles existence.
        if !kills(c, dirs, &vec![big; s], check)? {
            return Ok(None);
        }
        for j in 1..=bound {
            let k = lcm_upto(j).expect("below the cap");
            if kills(c, dirs, &vec![k; s], check)? {
                found = Some(k);
                break;
            }
        }
    } else {
        for k in 1..=bound as i64 {
            if kills(c, dirs, &vec![k; s], check)? {
                found = Some(k);
                break;
            }
        }
    }
    let Some(k) = found else {
        return Ok(None);
    };
    let mut ks = vec![k; s];
    for i in 0..s {
        'strip: loop {
            for p in prime_factors(ks[i]) {
                let mut trial = ks.clone();
                trial[i] /= p;
                if kills(c, dirs, &trial, check)? {
                    ks = trial;
                    continue 'strip;
                }
            }
            break;
        }
    }
    Ok(Some(ks))
}

/// Subsets of `0..n` by size, then lexicographically.
fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=n).flat_map(move |size| Combinations::new(n, size))
}

struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        self.cur = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                break Some(next);
            }
        };
        Some(out)
    }
}

fn search_corner(
    c: &Eval,
    f: &LaurentPoly,
    corner: &IntVector,
    avoid: Option<&SubspaceBasis>,
    bound: u64,
    check: &Region,
) -> Result<Option<DifferenceProduct>> {
    let dirs: Vec<IntVector> = f
        .support()
        .iter()
        .filter(|u| *u != corner)
        .map(|u| primitive(&(u - corner)))
        .collect::<Result<BTreeSet<_>>>()?
        .into_iter()
        .filter(|v| avoid.is_none_or(|s| !s.contains(v)))
        .collect();
    for subset in subsets(dirs.len()) {
        let chosen: Vec<IntVector> = subset.iter().map(|&i| dirs[i].clone()).collect();
        if let Some(ks) = find_multipliers(c, &chosen, bound, check)? {
            let vs = chosen.iter().zip(&ks).map(|(d, &k)| d.scale(k)).collect();
            return Ok(Some(DifferenceProduct::new(vs)?));
        }
    }
    Ok(None)
}

fn validate(dp: &DifferenceProduct, c: &Eval, check: &Region) -> Result<()> {
    let v = eval::annihilates(&dp.polynomial(c.dim())?, c, check)?;
    if v.holds() {
        Ok(())
    } else {
        Err(Error::Verification(format!("{dp:?} does not annihilate ({v})")))
    }
}

/// Looks for pairwise non-parallel `v_i` with `Π (X^{v_i} - 1)` annihilating
/// `c`, the `v_i` being multiples (at most `bound`) of directions from a
/// corner of `supp(f)` to its other points. Corners are tried in
/// lexicographic order and direction subsets by size. Exhaustion is
/// inconclusive, not a refutation.
pub fn search_difference_annihilator(
    c: &Eval,
    f: &LaurentPoly,
    bound: u64,
    check: &Region,
) -> Result<DifferenceProduct> {
    precheck(c, f, check)?;
    for corner in f.support() {
        if let Some(dp) = search_corner(c, f, &corner, None, bound, check)? {
            validate(&dp, c, check)?;
            return Ok(dp);
        }
    }
    Err(Error::Inconclusive {
        what: format!("no difference-product annihilator from the support of {f}"),
        bound,
    })
}

/// Same search restricted to directions outside `space`, so every vector
/// found is usable against that periodicity subspace.
pub(crate) fn search_avoiding(
    c: &Eval,
    f: &LaurentPoly,
    space: &SubspaceBasis,
    bound: u64,
    check: &Region,
) -> Result<DifferenceProduct> {
    precheck(c, f, check)?;
    for corner in f.support() {
        if let Some(dp) = search_corner(c, f, &corner, Some(space), bound, check)? {
            validate(&dp, c, check)?;
            return Ok(dp);
        }
    }
    Err(Error::Inconclusive {
        what: format!("no difference-product annihilator from the support of {f} avoiding the subspace"),
        bound,
    })
}

fn precheck(c: &Eval, f: &LaurentPoly, check: &Region) -> Result<()> {
    Error::check_dim(c.dim(), f.dim())?;
    if f.len() < 2 {
        return Err(Error::Precondition(
            "annihilator needs at least two support points".into(),
        ));
    }
    require(eval::annihilates(f, c, check)?, || {
        format!("{f} does not annihilate the input")
    })?;
    Ok(())
}

/// Rewrites `dp` until its vectors are pairwise non-parallel and every
/// pair spans a plane meeting `space` only at the origin.
///
/// Parallel pairs merge into one factor `X^{q·v} - 1` with `q` the least
/// period (at most `bound`) of the rest of the product applied to `e`. A
/// pair `v_i, v_j` whose span meets `space` is rewritten through an
/// integer relation `p'·v_j = p·v_i + v`, where `v` lies in the integer
/// span of `space`'s basis. Those basis vectors must be periods of `e`;
/// `v` is then one as well and the factor for `v_j` becomes one parallel
/// to `v_i`. Every rewrite is re-validated.
pub fn reduce_annihilator(
    dp: &DifferenceProduct,
    e: &Eval,
    space: &SubspaceBasis,
    bound: u64,
    check: &Region,
) -> Result<DifferenceProduct> {
    let d = e.dim();
    Error::check_dim(d, space.ambient_dim())?;
    validate(dp, e, check).map_err(|err| Error::Precondition(err.to_string()))?;
    for v in dp.vectors() {
        if space.contains(v) {
            return Err(Error::Precondition(format!("{v} lies in the periodicity subspace")));
        }
    }
    let witnesses = space.integer_basis();
    let mut vs: Vec<IntVector> = dp.vectors().to_vec();
    loop {
        if let Some((i, j)) = find_pair(&vs, parallel) {
            vs = merge_parallel(&vs, i, j, e, bound, check)?;
        } else if let Some((i, j)) = find_pair(&vs, |a, b| !span_meets_trivially(a, b, space)) {
            vs[j] = collision_rewrite(&vs[i], &vs[j], &witnesses)?;
        } else {
            break;
        }
        let next = DifferenceProduct::new(vs.clone())?;
        validate(&next, e, check).map_err(|err| {
            Error::Internal(format!("rewrite broke annihilation: {err}"))
        })?;
    }
    DifferenceProduct::new(vs)
}

fn find_pair(vs: &[IntVector], pred: impl Fn(&IntVector, &IntVector) -> bool) -> Option<(usize, usize)> {
    (0..vs.len()).find_map(|i| (i + 1..vs.len()).find(|&j| pred(&vs[i], &vs[j])).map(|j| (i, j)))
}

fn merge_parallel(
    vs: &[IntVector],
    i: usize,
    j: usize,
    e: &Eval,
    bound: u64,
    check: &Region,
) -> Result<Vec<IntVector>> {
    let rest: Vec<IntVector> = vs
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i && k != j)
        .map(|(_, v)| v.clone())
        .collect();
    let g = eval::act(&LaurentPoly::difference_product(e.dim(), &rest)?, e)?;
    let dir = primitive(&vs[i])?;
    for q in 1..=bound as i64 {
        let step = dir.scale(q);
        let ok = match eval::has_period(&g, &step, check) {
            Ok(v) => v.holds(),
            Err(Error::EmptyErosion) => false,
            Err(err) => return Err(err),
        };
        if ok {
            let mut out = rest;
            out.insert(i.min(out.len()), step);
            return Ok(out);
        }
    }
    Err(Error::Inconclusive {
        what: format!("no period along {dir} for merging {} and {}", vs[i], vs[j]),
        bound,
    })
}

/// Replacement for `vj`: `|p|·vi` from an integer relation
/// `p'·vj = p·vi + Σ β_k w_k`.
fn collision_rewrite(vi: &IntVector, vj: &IntVector, witnesses: &[IntVector]) -> Result<IntVector> {
    let d = vi.dim();
    let ncols = 2 + witnesses.len();
    let rows: Vec<Vec<BigRational>> = (0..d)
        .map(|r| {
            let mut row = vec![
                BigRational::from_integer(vi[r].into()),
                BigRational::from_integer((-vj[r]).into()),
            ];
            row.extend(witnesses.iter().map(|w| BigRational::from_integer(w[r].into())));
            row
        })
        .collect();
    let null = nullspace(&rows, ncols);
    let rel = null
        .first()
        .ok_or_else(|| Error::Internal("span collision without a relation".into()))?;
    let rel = clear_denominators(rel)?;
    let p = rel[0];
    if p == 0 || rel[1] == 0 {
        return Err(Error::Internal(format!("degenerate relation {rel}")));
    }
    Ok(vi.scale(p.abs()))
}

/// Turns a periodizer `g` (with `supp(g) ∩ V = {0}`) into an annihilator
/// `(X^{n·w} - 1)·g` whose support still meets `V` only at the origin;
/// `w` is a period of `g·c` outside `V`. Needs `g·c` in finite form.
pub fn annihilator_from_periodizer(
    g: &LaurentPoly,
    c: &Eval,
    space: &SubspaceBasis,
    n_bound: u64,
    check: &Region,
) -> Result<LaurentPoly> {
    let d = c.dim();
    Error::check_dim(d, g.dim())?;
    if !g.support_meets_only_origin(space)? {
        return Err(Error::Precondition(format!(
            "support of {g} meets the subspace outside the origin"
        )));
    }
    let gc = eval::act(g, c)?;
    let periods: IntLattice = match gc.as_config() {
        Some(ConfigView::Periodic(p)) => p.period_lattice(),
        Some(ConfigView::Fibers(s)) if s.is_empty() => IntLattice::integer_grid(d),
        _ => {
            return Err(Error::Precondition(
                "the periodized input must be a periodic configuration".into(),
            ))
        }
    };
    let w = periods
        .basis()
        .iter()
        .find(|w| !space.contains(w))
        .cloned()
        .ok_or_else(|| Error::Precondition("every period lies in the subspace".into()))?;
    for n in 1..=n_bound as i64 {
        let f = LaurentPoly::difference(&w.scale(n))?.try_mul(g)?;
        if !f.support_meets_only_origin(space)? {
            continue;
        }
        let v = eval::annihilates(&f, c, check)?;
        if !v.holds() {
            return Err(Error::Verification(format!("{f} does not annihilate ({v})")));
        }
        return Ok(f);
    }
    Err(Error::Inconclusive {
        what: format!("no n with supp((X^(n*{w}) - 1)*g) meeting the subspace only at 0"),
        bound: n_bound,
    })
}

/// `f = (X^{n_m v_m} - 1) ··· (X^{n_2 v_2} - 1)(X^{v_1} - 1)` with each `n_i`
/// the least value keeping `supp(f) ∩ V = {0}`; `v_i` must be a period of
/// the `i`-th component and lie outside `V`.
pub fn build_periodizer(
    components: &[(Eval, IntVector)],
    space: &SubspaceBasis,
    n_bound: u64,
    check: &Region,
) -> Result<LaurentPoly> {
    let Some((_, first)) = components.first() else {
        return Err(Error::Invalid("no components".into()));
    };
    for (e, v) in components {
        if space.contains(v) {
            return Err(Error::Precondition(format!("period {v} lies in the subspace")));
        }
        require(eval::has_period(e, v, check)?, || format!("{v} is not a period of its component"))?;
    }
    let mut f = LaurentPoly::difference(first)?;
    for (_, v) in &components[1..] {
        let mut next = None;
        for n in 1..=n_bound as i64 {
            let cand = LaurentPoly::difference(&v.scale(n))?.try_mul(&f)?;
            if cand.support_meets_only_origin(space)? {
                next = Some(cand);
                break;
            }
        }
        f = next.ok_or_else(|| Error::Inconclusive {
            what: format!("no multiple of {v} keeps the support off the subspace"),
            bound: n_bound,
        })?;
    }
    Ok(f)
}
