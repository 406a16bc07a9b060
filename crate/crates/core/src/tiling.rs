//! Translational tilings: a finite `D ⊂ Z^d` tiles with co-tiler `c`
//! (a 0/1 configuration) when `f·c = 1` for `f = Σ_{u ∈ -D} X^u`.
//! Co-tilers of `k` independent tiles split into `k`-periodic parts.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::config::{ConfigView, Verdict};
use crate::decompose::{k_periodic_decompose, Bounds, Decomposition};
use crate::error::{Error, Result};
use crate::eval::Eval;
use crate::lattice::{nullspace, rank_rational, ratv, SubspaceBasis};
use crate::laurent::LaurentPoly;
use crate::vector::IntVector;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tile {
    dim: usize,
    cells: Vec<IntVector>,
}

impl Tile {
    /// Cells are kept sorted; an empty set or a repeated cell is rejected.
    pub fn new(dim: usize, cells: Vec<IntVector>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Invalid("a tile needs at least one cell".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &cells {
            Error::check_dim(dim, c.dim())?;
            if !seen.insert(c.clone()) {
                return Err(Error::Invalid(format!("cell {c} appears twice")));
            }
        }
        Ok(Tile {
            dim,
            cells: seen.into_iter().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[IntVector] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Whether the origin is a cell.
    pub fn is_normalized(&self) -> bool {
        self.cells.iter().any(IntVector::is_zero)
    }

    fn nonzero_cells(&self) -> Vec<IntVector> {
        self.cells.iter().filter(|c| !c.is_zero()).cloned().collect()
    }
}

impl fmt::Debug for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tile{:?}", self.cells)
    }
}

/// `Σ_{u ∈ -D} X^u`.
pub fn tile_polynomial(tile: &Tile) -> LaurentPoly {
    LaurentPoly::from_terms(tile.dim, tile.cells.iter().map(|c| (-c, 1)))
        .expect("cells share the tile dimension")
}

/// Whether `c` is a co-tiler of `tile`, i.e. `f·c` is the constant 1.
/// Exact for periodic configurations and fiber sums; windows are judged on
/// the eroded region only.
pub fn verify_cotiler(tile: &Tile, c: &ConfigView) -> Result<Verdict> {
    Error::check_dim(c.dim(), tile.dim)?;
    let binary = [BigInt::zero(), BigInt::one()];
    if !c.values_within(&binary) {
        return Err(Error::Invalid("a co-tiler takes only the values 0 and 1".into()));
    }
    let fc = c.apply_poly(&tile_polynomial(tile))?;
    let one = BigInt::one();
    Ok(match fc {
        ConfigView::Periodic(p) => Verdict::Exact(p.values().values().all(|v| v == &one)),
        // Only in dimension one can a fiber sum be constant: one line,
        // every value 1.
        ConfigView::Fibers(s) => Verdict::Exact(
            s.dim() == 1 && s.fibers().len() == 1 && s.fibers()[0].vals().iter().all(|v| v == &one),
        ),
        ConfigView::Window(w) => Verdict::WindowOnly {
            holds: w.values().iter().all(|v| v == &one),
            region: w.region().clone(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Independence {
    Independent,
    /// The first dependent choice in lexicographic order of choice tuples,
    /// with a rational relation `Σ λ_i v_i = 0`.
    Dependent {
        choice: Vec<IntVector>,
        relation: Vec<BigRational>,
    },
}

impl Independence {
    pub fn holds(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

const FILTER_PRIME: i128 = (1 << 61) - 1;

/// Rank modulo a large prime. Never exceeds the rational rank, so a full
/// rank here settles independence without rational arithmetic.
fn rank_mod_p(vectors: &[IntVector]) -> usize {
    let p = FILTER_PRIME;
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| (x as i128).rem_euclid(p)).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let k = rows[r][col] * inv % p;
                for c in col..cols {
                    rows[r][c] = (rows[r][c] - k * rows[rank][c] % p).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: i128, mut e: i128, p: i128) -> i128 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn choices(cells: &[Vec<IntVector>], first: &IntVector) -> impl Iterator<Item = Vec<IntVector>> {
    let rest: Vec<Vec<IntVector>> = cells[1..].to_vec();
    let mut idx = vec![0usize; rest.len()];
    let mut done = rest.iter().any(Vec::is_empty);
    let first = first.clone();
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut out = vec![first.clone()];
        out.extend(idx.iter().zip(&rest).map(|(&i, r)| r[i].clone()));
        // Odometer, last position fastest.
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < rest[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
        Some(out)
    })
}

/// Whether every choice `v_i ∈ D_i ∖ {0}` is linearly independent over Q.
/// Tiles must be normalized and there can be at most `d` of them.
pub fn independent(tiles: &[Tile]) -> Result<Independence> {
    let Some(first) = tiles.first() else {
        return Ok(Independence::Independent);
    };
    let d = first.dim;
    for t in tiles {
        Error::check_dim(d, t.dim)?;
        if !t.is_normalized() {
            return Err(Error::Precondition(format!("{t:?} does not contain the origin")));
        }
    }
    if tiles.len() > d {
        return Err(Error::Precondition(format!("{} tiles in dimension {d}", tiles.len())));
    }
    let cells: Vec<Vec<IntVector>> = tiles.iter().map(Tile::nonzero_cells).collect();
    let k = tiles.len();
    let found = cells[0].par_iter().find_map_first(|head| {
        choices(&cells, head).find(|choice| rank_mod_p(choice) < k && rank_rational(choice) < k)
    });
    Ok(match found {
        None => Independence::Independent,
        Some(choice) => {
            let rows: Vec<Vec<BigRational>> = (0..d)
                .map(|r| choice.iter().map(|v| ratv(v)[r].clone()).collect())
                .collect();
            let relation = nullspace(&rows, k)
                .into_iter()
                .next()
                .expect("dependent vectors have a relation");
            Independence::Dependent { choice, relation }
        }
    })
}

/// The first `f_i` whose support meets `space` only at the origin.
pub fn select_periodizer(fs: &[LaurentPoly], space: &SubspaceBasis) -> Result<LaurentPoly> {
    for f in fs {
        Error::check_dim(space.ambient_dim(), f.dim())?;
        if f.coefficient(&IntVector::zero(f.dim())).is_zero() {
            return Err(Error::Precondition(format!("{f} has no constant term")));
        }
        if f.support_meets_only_origin(space)? {
            return Ok(f.clone());
        }
    }
    Err(Error::Precondition(
        "every periodizer meets the subspace away from the origin, so the tiles are not independent".into(),
    ))
}

/// Splits a common co-tiler of `k` independent tiles into `k`-periodic
/// components, asking [`select_periodizer`] for a periodizer whenever a
/// subspace comes up.
pub fn cotiler_decompose(tiles: &[Tile], c: &ConfigView, bounds: &Bounds) -> Result<Decomposition> {
    if tiles.is_empty() {
        return Err(Error::Invalid("no tiles".into()));
    }
    if let Independence::Dependent { choice, .. } = independent(tiles)? {
        return Err(Error::DependentTiles { witness: choice });
    }
    for t in tiles {
        let v = verify_cotiler(t, c)?;
        if !v.holds() {
            return Err(Error::Precondition(format!("not a co-tiler of {t:?} ({v})")));
        }
    }
    let polys: Vec<LaurentPoly> = tiles.iter().map(tile_polynomial).collect();
    let input: Eval = Arc::new(c.clone());
    let k = tiles.len();
    let dec = k_periodic_decompose(&input, k, |v| select_periodizer(&polys, v), bounds)?;
    let region = bounds.check_region(c.dim());
    let report = dec.verify(&input, &region)?;
    if !report.passed() {
        return Err(Error::Verification(format!("decomposition check failed: {report:?}")));
    }
    for comp in &dec.components {
        if rank_rational(&comp.periods) < k {
            return Err(Error::Verification(format!(
                "component periods {:?} are not {k} independent vectors",
                comp.periods
            )));
        }
    }
    Ok(dec)
}
