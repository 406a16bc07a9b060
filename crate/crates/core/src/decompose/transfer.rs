use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use parking_lot::Mutex;

use super::require;
use crate::config::Region;
use crate::error::{Error, Result};
use crate::eval::{self, Eval, Evaluator};
use crate::lattice::{span_meets_trivially, CosetSystem, SubspaceBasis};
use crate::laurent::LaurentPoly;
use crate::vector::IntVector;

/// Values of `c` along one line `base + Z·v1`, grown on demand in both
/// directions from the zero band.
#[derive(Default)]
struct LineState {
    /// Positions `0, 1, 2, ...`.
    fwd: Vec<BigRational>,
    /// Positions `-1, -2, ...`.
    bwd: Vec<BigRational>,
}

impl LineState {
    fn get(&self, a: i64) -> &BigRational {
        if a >= 0 {
            &self.fwd[a as usize]
        } else {
            &self.bwd[(-a - 1) as usize]
        }
    }
}

/// A solution `c` of `φc = c'`, `ψc = 0`, built by the coset recurrence:
/// `c` vanishes on the band `a1 ∈ [0, n)` of every coset line and the
/// recurrence fixes it everywhere else.
pub struct TransferSolution {
    source: Eval,
    phi: LaurentPoly,
    psi: LaurentPoly,
    space: SubspaceBasis,
    cosets: CosetSystem,
    /// `φ = X^shift · Σ α_t X^{t·v1}`.
    shift: IntVector,
    alphas: Vec<BigRational>,
    lines: Mutex<HashMap<IntVector, Arc<Mutex<LineState>>>>,
}

impl fmt::Debug for TransferSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TransferSolution(phi = {}, psi = {}, cosets {:?})",
            self.phi,
            self.psi,
            self.cosets.generators()
        )
    }
}

/// Builds the solution of `φc = c'`, `ψc = 0` in the zero-band gauge.
///
/// The integer basis of `space` is used as the coset generators `b_i`; when
/// those vectors are periods of `c'` they are exact periods of `c` too.
/// Preconditions on `c'` are checked exactly for finite representations
/// and on `check` otherwise.
pub fn solve_transfer(
    phi: &LaurentPoly,
    psi: &LaurentPoly,
    cprime: &Eval,
    space: &SubspaceBasis,
    check: &Region,
) -> Result<TransferSolution> {
    let d = cprime.dim();
    Error::check_dim(d, phi.dim())?;
    Error::check_dim(d, psi.dim())?;
    Error::check_dim(d, space.ambient_dim())?;
    let (line, alphas) = phi.line_profile()?;
    let (line2, _) = psi.line_profile()?;
    let (v1, v2) = (line.direction.clone(), line2.direction.clone());
    if v1 == v2 {
        return Err(Error::ParallelDirections(v1, v2));
    }
    if !span_meets_trivially(&v1, &v2, space) {
        return Err(Error::SpanCondition(v1, v2));
    }
    require(eval::annihilates(psi, cprime, check)?, || {
        format!("{psi} does not annihilate the source")
    })?;
    let witnesses = space.integer_basis();
    for b in &witnesses {
        require(eval::has_period(cprime, b, check)?, || {
            format!("subspace vector {b} is not a period of the source")
        })?;
    }
    let mut gens = vec![v1, v2];
    gens.extend(witnesses);
    let cosets = CosetSystem::new(d, gens)?;
    Ok(TransferSolution {
        source: cprime.clone(),
        phi: phi.clone(),
        psi: psi.clone(),
        space: space.clone(),
        cosets,
        shift: line.anchor,
        alphas: alphas.into_iter().map(BigRational::from_integer).collect(),
        lines: Mutex::new(HashMap::new()),
    })
}

impl TransferSolution {
    pub fn phi(&self) -> &LaurentPoly {
        &self.phi
    }

    pub fn psi(&self) -> &LaurentPoly {
        &self.psi
    }

    pub fn space(&self) -> &SubspaceBasis {
        &self.space
    }

    pub fn cosets(&self) -> &CosetSystem {
        &self.cosets
    }

    pub fn source(&self) -> &Eval {
        &self.source
    }

    /// Width `n` of the zero band.
    pub fn band_width(&self) -> usize {
        self.alphas.len() - 1
    }

    fn v1(&self) -> &IntVector {
        &self.cosets.generators()[0]
    }

    /// Coset coordinate `a1` of `x`.
    pub fn band_coordinate(&self, x: &IntVector) -> Result<i64> {
        Ok(self.cosets.coordinates(x)?.1[0])
    }

    /// Plain description of the gauge for reports.
    pub fn gauge(&self) -> String {
        format!(
            "zero on a1 in [0,{}) for cosets of {:?}",
            self.band_width(),
            self.cosets.generators()
        )
    }

    /// The normalized right-hand side `c'(y + shift)` at line position `a`.
    fn rhs(&self, base: &IntVector, a: i64) -> Result<BigRational> {
        let y = &(base + &self.v1().scale(a)) + &self.shift;
        self.source.eval(&y).map_err(|e| match e {
            Error::OutOfDomain { .. } => e.context(
                "source window is too small to reach the initialization band from this point",
            ),
            e => e,
        })
    }

    fn extend(&self, base: &IntVector, st: &mut LineState, a1: i64) -> Result<()> {
        let n = self.band_width();
        if st.fwd.is_empty() {
            st.fwd = vec![BigRational::zero(); n];
        }
        let al = &self.alphas;
        // Forward: α0 c[a] = c'[a] - Σ_{t≥1} α_t c[a-t].
        while a1 >= st.fwd.len() as i64 {
            let a = st.fwd.len() as i64;
            let mut acc = self.rhs(base, a)?;
            for (t, alpha) in al.iter().enumerate().skip(1) {
                acc -= alpha * st.get(a - t as i64);
            }
            st.fwd.push(acc / &al[0]);
        }
        // Backward, from the equation at a + n:
        // α_n c[a] = c'[a+n] - Σ_{t<n} α_t c[a+n-t].
        while a1 < -(st.bwd.len() as i64) {
            let a = -(st.bwd.len() as i64) - 1;
            let mut acc = self.rhs(base, a + n as i64)?;
            for (t, alpha) in al.iter().enumerate().take(n) {
                acc -= alpha * st.get(a + (n - t) as i64);
            }
            st.bwd.push(acc / &al[n]);
        }
        Ok(())
    }

    /// Equation residual `Σ α_t c(x - t·v1) - c'(x + shift)`, zero by
    /// construction; exposed for tests and reports.
    pub fn residual(&self, x: &IntVector) -> Result<BigRational> {
        let mut acc = -self.source.eval(&(x + &self.shift))?;
        for (t, alpha) in self.alphas.iter().enumerate() {
            acc += alpha * self.eval(&(x - &self.v1().scale(t as i64)))?;
        }
        Ok(acc)
    }
}

impl Evaluator for TransferSolution {
    fn dim(&self) -> usize {
        self.cosets.dim()
    }

    fn eval(&self, x: &IntVector) -> Result<BigRational> {
        let (_, coords) = self.cosets.coordinates(x)?;
        let a1 = coords[0];
        let base = x - &self.v1().scale(a1);
        let state = self.lines.lock().entry(base.clone()).or_default().clone();
        let mut st = state.lock();
        self.extend(&base, &mut st, a1)?;
        Ok(st.get(a1).clone())
    }
}
