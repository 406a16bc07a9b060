use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::{require, transfer::solve_transfer, Bounds, Component, Decomposition};
use crate::error::{Error, Result};
use crate::eval::{self, Eval};
use crate::lattice::{span_meets_trivially, SubspaceBasis};
use crate::laurent::LaurentPoly;

/// Splits `c` into `m` summands with `φ_i c_i = 0`, given that the product
/// of the line polynomials `φ_i` annihilates `c`.
///
/// Induction on `m`: decompose `φ_m c` with the first `m - 1` factors, lift
/// every piece through the transfer solver, and let the last summand be the
/// residual. The integer basis of `space` should consist of periods of `c`;
/// every component then has those periods too.
pub fn decompose_product(
    phis: &[LaurentPoly],
    c: &Eval,
    space: &SubspaceBasis,
    bounds: &Bounds,
) -> Result<Decomposition> {
    let d = c.dim();
    if phis.is_empty() {
        return Err(Error::Invalid("need at least one line polynomial".into()));
    }
    let mut dirs = Vec::with_capacity(phis.len());
    for phi in phis {
        Error::check_dim(d, phi.dim())?;
        dirs.push(phi.line_direction().ok_or(Error::NotLinePolynomial)?.direction);
    }
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            if dirs[i] == dirs[j] {
                return Err(Error::ParallelDirections(dirs[i].clone(), dirs[j].clone()));
            }
            if !span_meets_trivially(&dirs[i], &dirs[j], space) {
                return Err(Error::SpanCondition(dirs[i].clone(), dirs[j].clone()));
            }
        }
    }
    let check = bounds.check_region(d);
    let product = phis
        .iter()
        .try_fold(LaurentPoly::one(d), |acc, p| acc.try_mul(p))?;
    require(eval::annihilates(&product, c, &check)?, || {
        "the product of the line polynomials does not annihilate the input".into()
    })?;
    let periods = space.integer_basis();
    for b in &periods {
        require(eval::has_period(c, b, &check)?, || {
            format!("subspace vector {b} is not a period of the input")
        })?;
    }
    let evaluators = split(phis, c, space, &check)?;
    let components = evaluators
        .into_iter()
        .zip(phis.iter().zip(dirs))
        .map(|(evaluator, (phi, direction))| Component {
            evaluator,
            annihilator: phi.clone(),
            direction,
            subspace: space.clone(),
            periods: periods.clone(),
        })
        .collect();
    Ok(Decomposition { components })
}

fn split(
    phis: &[LaurentPoly],
    c: &Eval,
    space: &SubspaceBasis,
    check: &crate::config::Region,
) -> Result<Vec<Eval>> {
    let m = phis.len();
    if m == 1 {
        return Ok(vec![c.clone()]);
    }
    let last = &phis[m - 1];
    let image = eval::act(last, c)?;
    let pieces = split(&phis[..m - 1], &image, space, check)
        .map_err(|e| e.context(format!("decomposing {last} applied to the input")))?;
    let mut out: Vec<Eval> = Vec::with_capacity(m);
    for (piece, phi) in pieces.iter().zip(phis) {
        let lifted = solve_transfer(last, phi, piece, space, check)
            .map_err(|e| e.context(format!("lifting the component annihilated by {phi}")))?;
        out.push(Arc::new(lifted));
    }
    let mut terms: Vec<(BigRational, Eval)> = vec![(BigRational::one(), c.clone())];
    terms.extend(out.iter().map(|e| (-BigRational::one(), e.clone())));
    out.push(eval::combine(&terms)?);
    Ok(out)
}
