//! Periodic decompositions: the coset-recurrence transfer solver, the
//! inductive product decomposition, and the annihilator manipulations that
//! feed them.

mod annihilator;
mod kperiodic;
mod product;
mod transfer;

use std::fmt;

use num_rational::BigRational;
use num_traits::One;

pub use annihilator::{
    annihilator_from_periodizer, build_periodizer, reduce_annihilator,
    search_difference_annihilator,
};
pub use kperiodic::k_periodic_decompose;
pub use product::decompose_product;
pub use transfer::{solve_transfer, TransferSolution};

use crate::config::{Region, Verdict};
use crate::error::{Error, Result};
use crate::eval::{self, Eval};
use crate::lattice::{parallel, SubspaceBasis};
use crate::laurent::LaurentPoly;
use crate::vector::IntVector;

/// Search limits. None of the underlying existence results comes with an
/// effective bound, so every search is cut off here and reported as
/// inconclusive when it runs out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Multipliers, periods in merge rules, and `n` in periodizer products.
    pub search: u64,
    /// Fiber periods.
    pub period: u64,
    /// Translates tried when looking for a stabilized limit.
    pub k_max: u64,
    /// Consecutive identical translates that count as stabilized.
    pub patience: u64,
    /// Half-width of the cube used for evidence checks on evaluators.
    pub check_radius: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            search: 32,
            period: 64,
            k_max: 256,
            patience: 8,
            check_radius: 6,
        }
    }
}

impl Bounds {
    pub fn check_region(&self, dim: usize) -> Region {
        Region::centered(dim, self.check_radius)
    }
}

/// `Π (X^{v_i} - 1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DifferenceProduct {
    vectors: Vec<IntVector>,
}

impl DifferenceProduct {
    pub fn new(vectors: Vec<IntVector>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            for v in &vectors {
                Error::check_dim(first.dim(), v.dim())?;
                if v.is_zero() {
                    return Err(Error::ZeroVector);
                }
            }
        }
        Ok(DifferenceProduct { vectors })
    }

    pub fn vectors(&self) -> &[IntVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn polynomial(&self, dim: usize) -> Result<LaurentPoly> {
        LaurentPoly::difference_product(dim, &self.vectors)
    }

    pub fn factors(&self) -> Result<Vec<LaurentPoly>> {
        self.vectors.iter().map(LaurentPoly::difference).collect()
    }

    pub fn is_pairwise_nonparallel(&self) -> bool {
        let v = &self.vectors;
        (0..v.len()).all(|i| (i + 1..v.len()).all(|j| !parallel(&v[i], &v[j])))
    }
}

impl fmt::Debug for DifferenceProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferenceProduct{:?}", self.vectors)
    }
}

/// One summand of a decomposition.
#[derive(Clone, Debug)]
pub struct Component {
    pub evaluator: Eval,
    /// A line polynomial annihilating this component.
    pub annihilator: LaurentPoly,
    /// Primitive direction of `annihilator`.
    pub direction: IntVector,
    /// Subspace of periodicity inherited from the input.
    pub subspace: SubspaceBasis,
    /// Integer vectors known to be periods, spanning the periodicity space.
    pub periods: Vec<IntVector>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub components: Vec<Component>,
}

/// Results of checking a decomposition against its input.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub sum_matches: bool,
    pub annihilated: Vec<Verdict>,
    pub periodic: Vec<Verdict>,
    pub region: Region,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.sum_matches
            && self.annihilated.iter().all(Verdict::holds)
            && self.periodic.iter().all(Verdict::holds)
    }
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sum(&self, dim: usize) -> Result<Eval> {
        if self.components.is_empty() {
            return Ok(eval::FnEvaluator::shared(dim, "zero", |_| 0.into()));
        }
        let terms: Vec<(BigRational, Eval)> = self
            .components
            .iter()
            .map(|c| (BigRational::one(), c.evaluator.clone()))
            .collect();
        eval::combine(&terms)
    }

    /// Checks `Σ c_i = c`, `φ_i c_i = 0`, and every recorded period.
    pub fn verify(&self, c: &Eval, region: &Region) -> Result<DecompositionReport> {
        let sum = self.sum(c.dim())?;
        let sum_matches = eval::agree_on(sum.as_ref(), c.as_ref(), region)?;
        let mut annihilated = Vec::new();
        let mut periodic = Vec::new();
        for comp in &self.components {
            annihilated.push(eval::annihilates(&comp.annihilator, &comp.evaluator, region)?);
            let mut v = Verdict::Exact(true);
            for p in &comp.periods {
                v = v.and(eval::has_period(&comp.evaluator, p, region)?);
            }
            periodic.push(v);
        }
        Ok(DecompositionReport {
            sum_matches,
            annihilated,
            periodic,
            region: region.clone(),
        })
    }
}

/// Fails with a precondition error unless `verdict` holds.
pub(crate) fn require(verdict: Verdict, what: impl FnOnce() -> String) -> Result<Verdict> {
    if verdict.holds() {
        Ok(verdict)
    } else {
        Err(Error::Precondition(format!("{} ({verdict})", what())))
    }
}
