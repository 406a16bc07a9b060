use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::IntLattice;
use crate::vector::IntVector;

/// A strongly periodic function: one value per coset of a full-rank
/// period lattice, keyed by the coset's Hermite residue.
#[derive(Clone, PartialEq, Eq)]
pub struct PeriodicConfig {
    basis: Vec<IntVector>,
    lattice: IntLattice,
    values: BTreeMap<IntVector, BigInt>,
}

impl PeriodicConfig {
    /// `values` must hold exactly one entry per canonical residue.
    pub fn new(basis: Vec<IntVector>, values: BTreeMap<IntVector, BigInt>) -> Result<Self> {
        let lattice = Self::lattice_of(&basis)?;
        let residues = lattice.residues();
        if residues.len() != values.len() {
            return Err(Error::Invalid(format!(
                "period lattice has {} residues, {} values given",
                residues.len(),
                values.len()
            )));
        }
        for r in &residues {
            if !values.contains_key(r) {
                return Err(Error::Invalid(format!("missing value for residue {r}")));
            }
        }
        Ok(PeriodicConfig {
            basis,
            lattice,
            values,
        })
    }

    pub fn from_fn<F>(basis: Vec<IntVector>, mut f: F) -> Result<Self>
    where
        F: FnMut(&IntVector) -> BigInt,
    {
        let lattice = Self::lattice_of(&basis)?;
        let values = lattice.residues().into_iter().map(|r| {
            let v = f(&r);
            (r, v)
        });
        Ok(PeriodicConfig {
            values: values.collect(),
            basis,
            lattice,
        })
    }

    pub fn constant(dim: usize, value: impl Into<BigInt>) -> Self {
        let value = value.into();
        let basis: Vec<_> = (0..dim).map(|i| IntVector::unit(dim, i)).collect();
        Self::from_fn(basis, |_| value.clone()).expect("identity basis")
    }

    /// `(x + y) mod 2` in the first two coordinates, on basis `diag(2, 2)`.
    pub fn checkerboard() -> Self {
        Self::from_fn(vec![IntVector::from([2, 0]), IntVector::from([0, 2])], |r| {
            BigInt::from((r[0] + r[1]).rem_euclid(2))
        })
        .expect("diagonal basis")
    }

    fn lattice_of(basis: &[IntVector]) -> Result<IntLattice> {
        let dim = basis.first().map(|b| b.dim()).unwrap_or(0);
        if dim == 0 || basis.len() != dim {
            return Err(Error::Invalid(
                "period basis must be d vectors of length d".into(),
            ));
        }
        let lattice = IntLattice::from_generators(dim, basis)?;
        if !lattice.is_full_rank() {
            return Err(Error::Invalid("period basis is singular".into()));
        }
        Ok(lattice)
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn declared_basis(&self) -> &[IntVector] {
        &self.basis
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn values(&self) -> &BTreeMap<IntVector, BigInt> {
        &self.values
    }

    pub fn value(&self, x: &IntVector) -> &BigInt {
        &self.values[&self.lattice.reduce(x)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(Zero::is_zero)
    }

    /// Same function, re-expressed on a finer (sub)lattice of periods.
    pub fn refine(&self, lattice: &IntLattice) -> Result<PeriodicConfig> {
        if lattice.basis().iter().any(|b| !self.lattice.contains(b)) {
            return Err(Error::Internal("refinement is not a sublattice".into()));
        }
        PeriodicConfig::from_fn(lattice.basis().to_vec(), |r| self.value(r).clone())
    }

    /// The lattice of all periods, found by testing each residue of the
    /// declared lattice as a candidate translation.
    pub fn period_lattice(&self) -> IntLattice {
        let residues = self.lattice.residues();
        let mut gens: Vec<IntVector> = self.lattice.basis().to_vec();
        for r in &residues {
            if r.is_zero() {
                continue;
            }
            if residues.iter().all(|x| self.value(&(x + r)) == &self.values[x]) {
                gens.push(r.clone());
            }
        }
        IntLattice::from_generators(self.dim(), &gens).expect("periods of a full lattice")
    }

    pub fn translate(&self, t: &IntVector) -> PeriodicConfig {
        PeriodicConfig {
            basis: self.basis.clone(),
            lattice: self.lattice.clone(),
            values: self
                .values
                .keys()
                .map(|r| (r.clone(), self.value(&(r - t)).clone()))
                .collect(),
        }
    }
}

impl fmt::Debug for PeriodicConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PeriodicConfig(basis {:?}, values {:?})", self.basis, self.values)
    }
}
