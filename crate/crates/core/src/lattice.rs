//! Exact integer and rational lattice utilities.
//!
//! Everything here is decided exactly: ranks by fraction-free elimination
//! over the integers, subspace membership by rank comparison, and coset
//! representatives by reduction against a Hermite normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::vector::IntVector;

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Divides `v` by the gcd of its coordinates and flips the sign so that the
/// first nonzero coordinate is positive.
pub fn primitive(v: &IntVector) -> Result<IntVector> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    let lead = v.iter().find(|&&x| x != 0).copied().unwrap_or(1);
    let g = if lead < 0 { -g } else { g };
    Ok(IntVector::new(v.iter().map(|&x| x / g).collect()))
}

/// The multiple `k` with `v = k * primitive(v)`; may be negative.
pub fn primitive_multiple(v: &IntVector) -> Result<(IntVector, i64)> {
    let p = primitive(v)?;
    let i = p.iter().position(|&x| x != 0).expect("primitive vector is nonzero");
    Ok((p.clone(), v[i] / p[i]))
}

pub fn parallel(u: &IntVector, v: &IntVector) -> bool {
    rank_rational(&[u.clone(), v.clone()]) < 2
}

pub(crate) fn to_big_rows(vectors: &[IntVector]) -> Vec<Vec<BigInt>> {
    vectors
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Fraction-free (Bareiss) elimination; returns the rank.
fn bareiss_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let n = rows[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for i in rank + 1..m {
            for j in col + 1..n {
                let v = &rows[rank][col] * &rows[i][j] - &rows[i][col] * &rows[rank][j];
                rows[i][j] = v / &prev;
            }
            rows[i][col] = BigInt::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over the rationals of a set of integer vectors.
pub fn rank_rational(vectors: &[IntVector]) -> usize {
    bareiss_rank(to_big_rows(vectors))
}

fn rational_rows_to_integer(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let den = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * &den).to_integer()).collect()
        })
        .collect()
}

fn rank_rational_rows(rows: &[Vec<BigRational>]) -> usize {
    bareiss_rank(rational_rows_to_integer(rows))
}

pub(crate) fn ratv(v: &IntVector) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// Reduced row echelon form over the rationals; returns pivot columns.
fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return vec![];
    }
    let n = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..n {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Basis of `{x : A x = 0}` for `A` given by rows.
pub(crate) fn nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut a = rows.to_vec();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![BigRational::zero(); ncols];
        x[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = -a[r][free].clone();
        }
        out.push(x);
    }
    out
}

/// Solves `Σ coeffs[i] * vectors[i] = target` over the rationals, if possible.
/// Requires the vectors to be independent for a unique answer.
pub(crate) fn solve_in_span(
    vectors: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    let k = vectors.len();
    let d = target.len();
    // Augmented system: d equations in k unknowns.
    let mut rows: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = vectors.iter().map(|v| v[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = rows[r][k].clone();
    }
    Some(x)
}

/// Scales a rational vector by the lcm of its denominators.
pub(crate) fn clear_denominators(v: &[BigRational]) -> Result<IntVector> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g };
    ints.iter()
        .map(|x| {
            (x / &g)
                .to_i64()
                .ok_or_else(|| Error::Internal("coordinate overflow".into()))
        })
        .collect::<Result<Vec<_>>>()
        .map(IntVector::new)
}

/// A linear subspace of `R^d` given by a rational basis.
#[derive(Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    dim: usize,
    basis: Vec<Vec<BigRational>>,
}

impl SubspaceBasis {
    pub fn trivial(dim: usize) -> Self {
        SubspaceBasis { dim, basis: vec![] }
    }

    pub fn full(dim: usize) -> Self {
        let basis = (0..dim).map(|i| ratv(&IntVector::unit(dim, i))).collect();
        SubspaceBasis { dim, basis }
    }

    /// Rejects dependent or wrongly sized bases.
    pub fn new(dim: usize, basis: Vec<Vec<BigRational>>) -> Result<Self> {
        for b in &basis {
            Error::check_dim(dim, b.len())?;
        }
        if rank_rational_rows(&basis) != basis.len() {
            return Err(Error::Invalid("subspace basis is linearly dependent".into()));
        }
        Ok(SubspaceBasis { dim, basis })
    }

    pub fn from_vectors(dim: usize, vectors: &[IntVector]) -> Result<Self> {
        Self::new(dim, vectors.iter().map(ratv).collect())
    }

    /// Span of arbitrary vectors; keeps a maximal independent prefix-greedy subset.
    pub fn spanned_by(dim: usize, vectors: &[IntVector]) -> Self {
        let mut kept: Vec<IntVector> = Vec::new();
        for v in vectors {
            let mut trial = kept.clone();
            trial.push(v.clone());
            if rank_rational(&trial) == trial.len() {
                kept = trial;
            }
        }
        SubspaceBasis {
            dim,
            basis: kept.iter().map(ratv).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subspace itself.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.contains_rational(&ratv(x))
    }

    pub fn contains_rational(&self, x: &[BigRational]) -> bool {
        if x.iter().all(Zero::is_zero) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(x.to_vec());
        rank_rational_rows(&rows) == self.basis.len()
    }

    /// Basis vectors scaled to integers. Integer bases come back unchanged.
    pub fn integer_basis(&self) -> Vec<IntVector> {
        self.basis
            .iter()
            .map(|row| {
                let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                IntVector::new(
                    row.iter()
                        .map(|x| (x * &den).to_integer().to_i64().expect("basis overflow"))
                        .collect(),
                )
            })
            .collect()
    }

    pub fn same_subspace(&self, other: &SubspaceBasis) -> bool {
        self.dim == other.dim
            && self.rank() == other.rank()
            && other.basis.iter().all(|b| self.contains_rational(b))
    }

    /// The subspace spanned by `self` and `v`.
    pub fn extend(&self, v: &IntVector) -> SubspaceBasis {
        if self.contains(v) {
            return self.clone();
        }
        let mut basis = self.basis.clone();
        basis.push(ratv(v));
        SubspaceBasis {
            dim: self.dim,
            basis,
        }
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}} in R^{}", self.dim)
    }
}

/// True iff the rational span of `{u, v}` meets `space` only at the origin.
pub fn span_meets_trivially(u: &IntVector, v: &IntVector, space: &SubspaceBasis) -> bool {
    let mut rows = space.basis.clone();
    rows.push(ratv(u));
    rows.push(ratv(v));
    rank_rational_rows(&rows) == space.rank() + rank_rational(&[u.clone(), v.clone()])
}

/// A sublattice of `Z^d` stored as a Hermite normal form: echelon rows with
/// strictly increasing pivot columns, positive pivots, and entries above
/// each pivot reduced into `[0, pivot)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntLattice {
    dim: usize,
    rows: Vec<IntVector>,
    pivots: Vec<usize>,
}

fn hnf_rows(mut m: Vec<Vec<BigInt>>, width: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..width {
        if r == m.len() {
            break;
        }
        loop {
            let best = (r..m.len())
                .filter(|&i| !m[i][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
            let Some(best) = best else { break };
            m.swap(r, best);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = m[i][col].div_floor(&m[r][col]);
                for j in 0..width {
                    let delta = &q * &m[r][j];
                    m[i][j] -= delta;
                }
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][col].is_zero() {
            if m[r][col].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -&*x;
                }
            }
            for i in 0..r {
                let q = m[i][col].div_floor(&m[r][col]);
                if !q.is_zero() {
                    for j in 0..width {
                        let delta = &q * &m[r][j];
                        m[i][j] -= delta;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    m.truncate(r);
    (m, pivots)
}

fn big_to_intvector(row: &[BigInt]) -> Result<IntVector> {
    row.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::Internal("lattice coordinate overflow".into()))
        })
        .collect::<Result<Vec<_>>>()
        .map(IntVector::new)
}

impl IntLattice {
    /// The lattice generated by arbitrary integer vectors (any number).
    pub fn from_generators(dim: usize, generators: &[IntVector]) -> Result<Self> {
        for g in generators {
            Error::check_dim(dim, g.dim())?;
        }
        let (rows, pivots) = hnf_rows(to_big_rows(generators), dim);
        let rows = rows
            .iter()
            .map(|r| big_to_intvector(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntLattice { dim, rows, pivots })
    }

    pub fn integer_grid(dim: usize) -> Self {
        let gens: Vec<_> = (0..dim).map(|i| IntVector::unit(dim, i)).collect();
        Self::from_generators(dim, &gens).expect("identity lattice")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Hermite basis rows.
    pub fn basis(&self) -> &[IntVector] {
        &self.rows
    }

    /// `|det|`, the number of cosets, for full-rank lattices.
    pub fn index(&self) -> Option<u64> {
        if !self.is_full_rank() {
            return None;
        }
        Some(
            self.rows
                .iter()
                .zip(&self.pivots)
                .map(|(r, &p)| r[p] as u64)
                .product(),
        )
    }

    /// Canonical coset representative of `x`.
    pub fn reduce(&self, x: &IntVector) -> IntVector {
        let mut y: Vec<i64> = x.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let q = Integer::div_floor(&y[p], &row[p]);
            if q != 0 {
                for (yj, rj) in y.iter_mut().zip(row.iter()) {
                    *yj -= q * rj;
                }
            }
        }
        IntVector::new(y)
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.reduce(x).is_zero()
    }

    /// All canonical residues, in lexicographic order. Full rank only.
    pub fn residues(&self) -> Vec<IntVector> {
        assert!(self.is_full_rank(), "residues of a non-full-rank lattice");
        let bounds: Vec<i64> = (0..self.dim)
            .map(|c| {
                let i = self.pivots.iter().position(|&p| p == c).unwrap();
                self.rows[i][c]
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.dim];
        loop {
            out.push(IntVector::new(cur.clone()));
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < bounds[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    /// Lattice generated by `self` and `other`.
    pub fn join(&self, other: &IntLattice) -> Result<IntLattice> {
        let mut gens = self.rows.clone();
        gens.extend(other.rows.iter().cloned());
        IntLattice::from_generators(self.dim, &gens)
    }

    pub fn intersect(&self, other: &IntLattice) -> Result<IntLattice> {
        Error::check_dim(self.dim, other.dim)?;
        let r1 = self.rows.len();
        let r2 = other.rows.len();
        let n = r1 + r2;
        // Left kernel of [B1; -B2] via HNF of the augmented matrix [N | I].
        let mut aug: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for (i, row) in self.rows.iter().chain(other.rows.iter()).enumerate() {
            let sign = if i < r1 { 1 } else { -1 };
            let mut v: Vec<BigInt> = row.iter().map(|&x| BigInt::from(sign * x)).collect();
            v.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            aug.push(v);
        }
        let (h, pivots) = hnf_rows(aug, self.dim + n);
        let mut gens = Vec::new();
        for (row, &p) in h.iter().zip(&pivots) {
            if p < self.dim {
                continue;
            }
            let mut x = vec![BigInt::zero(); self.dim];
            for (i, b) in self.rows.iter().enumerate() {
                let a = &row[self.dim + i];
                for (xj, bj) in x.iter_mut().zip(b.iter()) {
                    *xj += a * BigInt::from(*bj);
                }
            }
            gens.push(big_to_intvector(&x)?);
        }
        IntLattice::from_generators(self.dim, &gens)
    }
}

/// Partition of `Z^d` into cosets of the integer span of independent
/// generators `(v1, v2, b1, ..., bk)`, each point written uniquely as
/// `z + a1*v1 + a2*v2 + Σ bi*b_i` with `z` its canonical representative.
#[derive(Clone, Debug)]
pub struct CosetSystem {
    dim: usize,
    generators: Vec<IntVector>,
    lattice: IntLattice,
    // Rows of the generator matrix that form an invertible square block.
    selected: Vec<usize>,
    // adj / det of that block, as a common-denominator integer matrix.
    inverse: Vec<Vec<i128>>,
    denominator: i128,
}

impl CosetSystem {
    pub fn new(dim: usize, generators: Vec<IntVector>) -> Result<Self> {
        for g in &generators {
            Error::check_dim(dim, g.dim())?;
        }
        if rank_rational(&generators) != generators.len() {
            return Err(Error::Precondition(
                "coset generators are dependent; expressions would not be unique".into(),
            ));
        }
        let lattice = IntLattice::from_generators(dim, &generators)?;
        let r = generators.len();
        // Pick r coordinates on which the generators are independent.
        let mut selected: Vec<usize> = Vec::new();
        for c in 0..dim {
            let mut trial = selected.clone();
            trial.push(c);
            let rows: Vec<IntVector> = trial
                .iter()
                .map(|&c| IntVector::new(generators.iter().map(|g| g[c]).collect()))
                .collect();
            if rank_rational(&rows) == trial.len() {
                selected = trial;
            }
            if selected.len() == r {
                break;
            }
        }
        // Invert the r x r block over the rationals.
        let mut aug: Vec<Vec<BigRational>> = selected
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut row: Vec<BigRational> = generators
                    .iter()
                    .map(|g| BigRational::from_integer(g[c].into()))
                    .collect();
                row.extend((0..r).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                row
            })
            .collect();
        rref(&mut aug);
        let inv: Vec<Vec<BigRational>> = aug.iter().map(|row| row[r..].to_vec()).collect();
        let den = inv
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let to_i128 = |x: BigInt| {
            x.to_i128()
                .ok_or_else(|| Error::Internal("coset inverse overflow".into()))
        };
        let inverse = inv
            .iter()
            .map(|row| row.iter().map(|x| to_i128((x * &den).to_integer())).collect())
            .collect::<Result<Vec<Vec<i128>>>>()?;
        Ok(CosetSystem {
            dim,
            generators,
            lattice,
            selected,
            inverse,
            denominator: to_i128(den)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[IntVector] {
        &self.generators
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    /// The fixed representative `z` of the coset containing `x`.
    pub fn representative(&self, x: &IntVector) -> IntVector {
        self.lattice.reduce(x)
    }

    /// Returns `(z, coords)` with `x = z + Σ coords[i] * generators[i]`.
    pub fn coordinates(&self, x: &IntVector) -> Result<(IntVector, Vec<i64>)> {
        Error::check_dim(self.dim, x.dim())?;
        let z = self.representative(x);
        let y = x - &z;
        let mut coords = Vec::with_capacity(self.generators.len());
        for row in &self.inverse {
            let num: i128 = row
                .iter()
                .zip(&self.selected)
                .map(|(a, &c)| a * y[c] as i128)
                .sum();
            if num % self.denominator != 0 {
                return Err(Error::Internal(format!(
                    "{x} - {z} is not in the integer span of the coset generators"
                )));
            }
            coords.push((num / self.denominator) as i64);
        }
        if self.rebuild(&z, &coords) != *x {
            return Err(Error::Internal(format!(
                "{x} - {z} is not in the integer span of the coset generators"
            )));
        }
        Ok((z, coords))
    }

    pub fn rebuild(&self, z: &IntVector, coords: &[i64]) -> IntVector {
        let mut out: Vec<i64> = z.to_vec();
        for (g, &a) in self.generators.iter().zip(coords) {
            for (o, gi) in out.iter_mut().zip(g.iter()) {
                *o += a * gi;
            }
        }
        IntVector::new(out)
    }
}
