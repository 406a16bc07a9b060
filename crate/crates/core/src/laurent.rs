//! Sparse multivariate Laurent polynomials with integer coefficients.
//!
//! A polynomial is a finite map from exponent vectors to nonzero
//! coefficients, kept in lexicographic exponent order. The zero polynomial
//! is the empty map, so two polynomials are equal exactly when their maps
//! are.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{primitive, primitive_multiple, SubspaceBasis};
use crate::vector::IntVector;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<IntVector, BigInt>,
}

/// Direction and anchor of a line polynomial's support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineDescriptor {
    /// Primitive, first nonzero coordinate positive.
    pub direction: IntVector,
    /// Lexicographically smallest support point.
    pub anchor: IntVector,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(IntVector::zero(dim), BigInt::one())
    }

    pub fn monomial(exp: IntVector, coef: impl Into<BigInt>) -> Self {
        let dim = exp.dim();
        let coef = coef.into();
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(exp, coef);
        }
        LaurentPoly { dim, terms }
    }

    /// Sums duplicate exponents and drops zero coefficients.
    pub fn from_terms<I, C>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (IntVector, C)>,
        C: Into<BigInt>,
    {
        let mut map: BTreeMap<IntVector, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            Error::check_dim(dim, e.dim())?;
            *map.entry(e).or_insert_with(BigInt::zero) += c.into();
        }
        map.retain(|_, c| !c.is_zero());
        Ok(LaurentPoly { dim, terms: map })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IntVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<IntVector> {
        self.terms.keys().cloned().collect()
    }

    pub fn coefficient(&self, exp: &IntVector) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        Error::check_dim(self.dim, other.dim)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Ok(LaurentPoly {
            dim: self.dim,
            terms,
        })
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        Error::check_dim(self.dim, other.dim)?;
        let mut terms: BTreeMap<IntVector, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                *terms.entry(e1 + e2).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(LaurentPoly {
            dim: self.dim,
            terms,
        })
    }

    pub fn scale(&self, k: &BigInt) -> LaurentPoly {
        if k.is_zero() {
            return LaurentPoly::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    /// Multiplication by the monomial `X^t`.
    pub fn shift(&self, t: &IntVector) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e + t, c.clone())).collect(),
        }
    }

    /// `X^v - 1`.
    pub fn difference(v: &IntVector) -> Result<LaurentPoly> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let dim = v.dim();
        let mut terms = BTreeMap::new();
        terms.insert(v.clone(), BigInt::one());
        terms.insert(IntVector::zero(dim), -BigInt::one());
        Ok(LaurentPoly { dim, terms })
    }

    /// `Π (X^{v_i} - 1)`; the empty product is `1`.
    pub fn difference_product(dim: usize, vectors: &[IntVector]) -> Result<LaurentPoly> {
        vectors.iter().try_fold(LaurentPoly::one(dim), |acc, v| {
            acc.try_mul(&LaurentPoly::difference(v)?)
        })
    }

    /// `Some` iff the support has at least two points, all on one line.
    pub fn line_direction(&self) -> Option<LineDescriptor> {
        let mut it = self.terms.keys();
        let anchor = it.next()?.clone();
        let second = it.next()?;
        let direction = primitive(&(second - &anchor)).ok()?;
        for p in it {
            let (dir, _) = primitive_multiple(&(p - &anchor)).ok()?;
            if dir != direction {
                return None;
            }
        }
        Some(LineDescriptor { direction, anchor })
    }

    pub fn is_line_polynomial(&self) -> bool {
        self.line_direction().is_some()
    }

    /// For a line polynomial: its descriptor and the coefficients `α_t`
    /// with `self = X^anchor · Σ α_t X^{t·direction}`, `t = 0..=n`.
    pub fn line_profile(&self) -> Result<(LineDescriptor, Vec<BigInt>)> {
        let line = self.line_direction().ok_or(Error::NotLinePolynomial)?;
        let mut offsets: Vec<(i64, BigInt)> = Vec::with_capacity(self.len());
        for (e, c) in &self.terms {
            let diff = e - &line.anchor;
            let t = if diff.is_zero() {
                0
            } else {
                primitive_multiple(&diff)?.1
            };
            offsets.push((t, c.clone()));
        }
        let n = offsets.iter().map(|(t, _)| *t).max().unwrap_or(0);
        let mut alphas = vec![BigInt::zero(); n as usize + 1];
        for (t, c) in offsets {
            alphas[t as usize] = c;
        }
        Ok((line, alphas))
    }

    /// Exactly `supp(self) ∩ space`.
    pub fn support_in_subspace(&self, space: &SubspaceBasis) -> Result<BTreeSet<IntVector>> {
        Error::check_dim(self.dim, space.ambient_dim())?;
        Ok(self
            .terms
            .keys()
            .filter(|e| space.contains(e))
            .cloned()
            .collect())
    }

    /// `supp(self) ∩ space == {0}`.
    pub fn support_meets_only_origin(&self, space: &SubspaceBasis) -> Result<bool> {
        let s = self.support_in_subspace(space)?;
        Ok(s.len() == 1 && s.contains(&IntVector::zero(self.dim)))
    }
}

pub fn poly_add(f: &LaurentPoly, g: &LaurentPoly) -> Result<LaurentPoly> {
    f.try_add(g)
}

pub fn poly_mul(f: &LaurentPoly, g: &LaurentPoly) -> Result<LaurentPoly> {
    f.try_mul(g)
}

pub fn difference_poly(v: &IntVector) -> Result<LaurentPoly> {
    LaurentPoly::difference(v)
}

pub fn line_direction(f: &LaurentPoly) -> Option<LineDescriptor> {
    f.line_direction()
}

pub fn support_in_subspace(f: &LaurentPoly, space: &SubspaceBasis) -> Result<BTreeSet<IntVector>> {
    f.support_in_subspace(space)
}

// Operator forms panic on dimension mismatch; use `poly_add`/`poly_mul`
// where dimensions come from untrusted input.
impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("polynomial dimension mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(&-rhs).expect("polynomial dimension mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("polynomial dimension mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest exponent first reads more naturally.
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| {
                    if x == 1 {
                        format!("X{}", j + 1)
                    } else {
                        format!("X{}^{}", j + 1, x)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write!(f, "{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[d={}]({self})", self.dim)
    }
}
