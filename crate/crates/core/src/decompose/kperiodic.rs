use num_rational::BigRational;
use num_traits::One;

use super::annihilator::{annihilator_from_periodizer, reduce_annihilator, search_avoiding};
use super::{decompose_product, Bounds, Component, DifferenceProduct, Decomposition};
use crate::error::{Error, Result};
use crate::eval::{self, Eval};
use crate::lattice::{lcm, ratv, solve_in_span, SubspaceBasis};
use crate::laurent::LaurentPoly;

/// Splits `c` into summands each having `k` linearly independent periods.
///
/// `oracle(V)` must return a periodizer of `c` whose support meets `V`
/// only at the origin. Level one queries the trivial subspace; level `l`
/// queries the `(l-1)`-dimensional periodicity space of every current
/// component, so only finitely many subspaces are ever asked about.
/// Components that end up with the same subspace are summed.
pub fn k_periodic_decompose<F>(
    c: &Eval,
    k: usize,
    oracle: F,
    bounds: &Bounds,
) -> Result<Decomposition>
where
    F: Fn(&SubspaceBasis) -> Result<LaurentPoly>,
{
    let d = c.dim();
    if k == 0 || k > d {
        return Err(Error::Invalid(format!("k = {k} must lie in 1..={d}")));
    }
    let check = bounds.check_region(d);
    let annihilator_for = |space: &SubspaceBasis| -> Result<DifferenceProduct> {
        let g = oracle(space)?;
        let f = annihilator_from_periodizer(&g, c, space, bounds.search, &check)?;
        search_avoiding(c, &f, space, bounds.search, &check)
    };

    let trivial = SubspaceBasis::trivial(d);
    let dp = annihilator_for(&trivial).map_err(|e| e.context("level 1, trivial subspace"))?;
    let mut components = decompose_product(&dp.factors()?, c, &trivial, bounds)?.components;
    for (comp, v) in components.iter_mut().zip(dp.vectors()) {
        comp.periods = vec![v.clone()];
        comp.subspace = SubspaceBasis::from_vectors(d, &comp.periods)?;
    }

    for level in 2..=k {
        let mut next = Vec::new();
        for (i, comp) in components.iter().enumerate() {
            let space = &comp.subspace;
            let ctx = |e: Error| e.context(format!("level {level}, subspace spanned by {:?}", comp.periods));
            let mut vs = annihilator_for(space).map_err(ctx)?.vectors().to_vec();
            for (j, other) in components.iter().enumerate() {
                if j == i {
                    continue;
                }
                let w = other
                    .periods
                    .iter()
                    .find(|w| !space.contains(w))
                    .ok_or_else(|| ctx(Error::Internal("two components share a subspace".into())))?;
                vs.push(w.clone());
            }
            let dp = DifferenceProduct::new(vs)?;
            let reduced = reduce_annihilator(&dp, &comp.evaluator, space, bounds.search, &check).map_err(ctx)?;
            let parts = decompose_product(&reduced.factors()?, &comp.evaluator, space, bounds).map_err(ctx)?;
            for (mut part, v) in parts.components.into_iter().zip(reduced.vectors()) {
                part.periods = comp.periods.iter().cloned().chain([v.clone()]).collect();
                part.subspace = SubspaceBasis::from_vectors(d, &part.periods)?;
                next.push(part);
            }
        }
        components = merge_same_subspace(next)?;
    }
    for comp in &mut components {
        let last = comp.periods.last().expect("at least one period").clone();
        comp.annihilator = LaurentPoly::difference(&last)?;
        comp.direction = crate::lattice::primitive(&last)?;
    }
    Ok(Decomposition { components })
}

/// Sums components with equal subspaces. The periods of the sum are
/// multiples of the first group member's periods that also lie in every
/// other member's period lattice.
fn merge_same_subspace(components: Vec<Component>) -> Result<Vec<Component>> {
    let mut groups: Vec<Vec<Component>> = Vec::new();
    for comp in components {
        match groups.iter_mut().find(|g| g[0].subspace.same_subspace(&comp.subspace)) {
            Some(g) => g.push(comp),
            None => groups.push(vec![comp]),
        }
    }
    groups
        .into_iter()
        .map(|mut group| {
            if group.len() == 1 {
                return Ok(group.pop().expect("nonempty"));
            }
            let mut periods = group[0].periods.clone();
            for other in &group[1..] {
                for p in &mut periods {
                    let coords = solve_in_span(&other.periods.iter().map(ratv).collect::<Vec<_>>(), &ratv(p)).ok_or_else(|| {
                        Error::Internal(format!("{p} is not in the span of {:?}", other.periods))
                    })?;
                    let m = coords.iter().fold(1i64, |acc, q| {
                        lcm(acc, i64::try_from(q.denom().clone()).expect("small denominators"))
                    });
                    *p = p.scale(m);
                }
            }
            let terms: Vec<(BigRational, Eval)> = group
                .iter()
                .map(|c| (BigRational::one(), c.evaluator.clone()))
                .collect();
            let first = &group[0];
            Ok(Component {
                evaluator: eval::combine(&terms)?,
                annihilator: first.annihilator.clone(),
                direction: first.direction.clone(),
                subspace: first.subspace.clone(),
                periods,
            })
        })
        .collect()
}
