//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every check compares library output against a computation written out
//! here, independently of the code under test.

use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use perdec::decompose::{decompose_product, solve_transfer};
use perdec::eval::FnEvaluator;
use perdec::lattice::{primitive, rank_rational};
use perdec::sparse::{check_sparseness, sparse_full, SparsenessCheck};
use perdec::tiling::{cotiler_decompose, independent, verify_cotiler, Independence, Tile};
use perdec::{
    Bounds, ConfigView, Eval, FiberSum, IntLattice, IntVector, LaurentPoly, PeriodicConfig, PeriodicFiber, Region,
    SubspaceBasis, Verdict, WindowConfig,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn iv(c: &[i64]) -> IntVector {
    IntVector::new(c.to_vec())
}

// ---------------------------------------------------------------------------
// Generators

fn random_poly(rng: &mut ChaCha8Rng, d: usize, max_terms: usize) -> LaurentPoly {
    let n = rng.gen_range(0..=max_terms);
    let terms: Vec<(IntVector, BigInt)> = (0..n)
        .map(|_| {
            let e: Vec<i64> = (0..d).map(|_| rng.gen_range(-4..=4)).collect();
            (IntVector::new(e), big(rng.gen_range(-9..=9)))
        })
        .collect();
    LaurentPoly::from_terms(d, terms).unwrap()
}

fn random_nonzero(rng: &mut ChaCha8Rng, d: usize, r: i64) -> IntVector {
    loop {
        let v = IntVector::new((0..d).map(|_| rng.gen_range(-r..=r)).collect());
        if !v.is_zero() {
            return v;
        }
    }
}

const DIRS2: [[i64; 2]; 10] = [[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, 1], [1, -2], [2, -1], [1, 3], [3, 1]];

fn random_fiber(rng: &mut ChaCha8Rng, dir: &IntVector, max_period: usize, r: i64) -> PeriodicFiber {
    let anchor = IntVector::new((0..dir.dim()).map(|_| rng.gen_range(-r..=r)).collect());
    let p = rng.gen_range(1..=max_period);
    loop {
        let vals: Vec<BigInt> = (0..p).map(|_| big(rng.gen_range(-3..=3))).collect();
        if vals.iter().any(|v| !v.is_zero()) {
            return PeriodicFiber::new(anchor, dir.clone(), vals).unwrap();
        }
    }
}

fn random_fibersum(rng: &mut ChaCha8Rng, d: usize) -> FiberSum {
    let n = rng.gen_range(1..=4);
    let fibers = (0..n)
        .map(|_| {
            let dir = primitive(&random_nonzero(rng, d, 2)).unwrap();
            random_fiber(rng, &dir, 4, 5)
        })
        .collect();
    FiberSum::new(d, fibers).unwrap()
}

/// Upper-triangular Hermite basis with determinant at most `max_det`.
fn random_hnf(rng: &mut ChaCha8Rng, d: usize, max_det: i64) -> Vec<IntVector> {
    loop {
        let diag: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=8)).collect();
        if diag.iter().product::<i64>() > max_det {
            continue;
        }
        return (0..d)
            .map(|i| {
                let mut row = vec![0; d];
                row[i] = diag[i];
                for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
                    *slot = rng.gen_range(0..diag[j]);
                }
                IntVector::new(row)
            })
            .collect();
    }
}

fn random_periodic(rng: &mut ChaCha8Rng, d: usize) -> PeriodicConfig {
    let coarse = PeriodicConfig::from_fn(random_hnf(rng, d, 64), |_| big(rng.gen_range(0..=3))).unwrap();
    if rng.gen_bool(0.5) {
        // Declare a finer lattice than the true one, so the period
        // lattice has to be discovered.
        let other = IntLattice::from_generators(d, &random_hnf(rng, d, 64)).unwrap();
        let fine = coarse.lattice().intersect(&other).unwrap();
        if fine.index().is_some_and(|i| i <= 64) {
            return coarse.refine(&fine).unwrap();
        }
    }
    coarse
}

fn lattice_combination(rng: &mut ChaCha8Rng, basis: &[IntVector]) -> IntVector {
    let d = basis[0].dim();
    loop {
        let mut v = IntVector::zero(d);
        for b in basis {
            v = &v + &b.scale(rng.gen_range(-2..=2));
        }
        if !v.is_zero() {
            return v;
        }
    }
}

// ---------------------------------------------------------------------------
// Oracles

/// `Σ f_e c(x - e)` over the rational values of an evaluator.
fn naive_act(f: &LaurentPoly, c: &dyn Fn(&IntVector) -> BigRational, x: &IntVector) -> BigRational {
    f.terms()
        .map(|(e, k)| BigRational::from_integer(k.clone()) * c(&(x - e)))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Naive convolution of a rasterized window: output on every point whose
/// stencil lies in the input box.
fn naive_window(f: &LaurentPoly, w: &WindowConfig) -> Vec<(IntVector, BigInt)> {
    let region = w.region();
    let d = region.dim();
    let support = f.support();
    let reach = |pick: fn(i64, i64) -> i64, i: usize| support.iter().map(|e| e[i]).reduce(pick).unwrap_or(0);
    let lo: Vec<i64> = (0..d).map(|i| region.lo[i] + reach(i64::min, i)).collect();
    let hi: Vec<i64> = (0..d).map(|i| region.hi[i] + reach(i64::max, i)).collect();
    let mut out = Vec::new();
    for x in Region::new(IntVector::new(lo), IntVector::new(hi)).unwrap().points() {
        let mut acc = BigInt::zero();
        let mut inside = true;
        for (e, k) in f.terms() {
            let y = &x - e;
            match w.get(&y) {
                Ok(v) => acc += k * v,
                Err(_) => {
                    inside = false;
                    break;
                }
            }
        }
        if inside {
            out.push((x, acc));
        }
    }
    out
}

fn bezout(p: &IntVector) -> IntVector {
    // q with q·p = 1 for a primitive p in dimension two.
    let (a, b) = (p[0], p[1]);
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i64, 0i64, 0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        iv(&[-s0, -t0])
    } else {
        iv(&[s0, t0])
    }
}

fn dot(a: &IntVector, b: &IntVector) -> i64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Criteria

fn ring_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1000 {
        let d = rng.gen_range(1..=3);
        let (f, g, h) = (
            random_poly(&mut rng, d, 6),
            random_poly(&mut rng, d, 6),
            random_poly(&mut rng, d, 6),
        );
        let mul = |a: &LaurentPoly, b: &LaurentPoly| a.try_mul(b).unwrap();
        let add = |a: &LaurentPoly, b: &LaurentPoly| a.try_add(b).unwrap();
        let laws = [
            ("mul assoc", mul(&mul(&f, &g), &h) == mul(&f, &mul(&g, &h))),
            ("add assoc", add(&add(&f, &g), &h) == add(&f, &add(&g, &h))),
            ("mul comm", mul(&f, &g) == mul(&g, &f)),
            ("add comm", add(&f, &g) == add(&g, &f)),
            ("distrib", mul(&f, &add(&g, &h)) == add(&mul(&f, &g), &mul(&f, &h))),
            ("unit", mul(&f, &LaurentPoly::one(d)) == f),
        ];
        for (name, ok) in laws {
            ensure(ok, || format!("triple {i}: {name} fails for {f}, {g}, {h}"))?;
        }
    }
    Ok("1000 triples".into())
}

fn annihilation_periodicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut members = 0;
    for i in 0..200 {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let p = random_periodic(&mut rng, d);
        let periods = p.period_lattice();
        let view = ConfigView::Periodic(p.clone());
        let residues = p.lattice().residues();
        for j in 0..50 {
            let v = if j % 2 == 0 {
                random_nonzero(&mut rng, d, 8)
            } else {
                lattice_combination(&mut rng, periods.basis())
            };
            let brute = residues.iter().all(|r| p.value(&(r + &v)) == p.value(r));
            let verdict = view.is_annihilated(&LaurentPoly::difference(&v).unwrap()).unwrap();
            ensure(verdict == Verdict::Exact(brute), || {
                format!("config {i}, v = {v}: brute force says {brute}, got {verdict}")
            })?;
            ensure(periods.contains(&v) == brute, || {
                format!("config {i}, v = {v}: period lattice disagrees with brute force")
            })?;
            members += brute as usize;
        }
    }
    Ok(format!("10000 vectors, {members} periods, 0 discrepancies"))
}

fn transfer_instance(rng: &mut ChaCha8Rng, i: usize) -> Result<(), String> {
    let d = if i % 3 == 2 { 3 } else { 2 };
    let (v, u, space, cprime, window) = loop {
        let (pv, pu) = if d == 2 {
            let mut pool = DIRS2.to_vec();
            pool.shuffle(rng);
            (iv(&pool[0]), iv(&pool[1]))
        } else {
            (primitive(&random_nonzero(rng, 3, 1)).unwrap(), primitive(&random_nonzero(rng, 3, 1)).unwrap())
        };
        if rank_rational(&[pv.clone(), pu.clone()]) < 2 {
            continue;
        }
        let v = pv.scale(rng.gen_range(1..=2));
        let u = pu.scale(rng.gen_range(1..=3));
        if d == 2 {
            let cprime = if rng.gen_bool(0.5) {
                // Fibers along u repeating with a period dividing |u|.
                let k = u.iter().map(|x| x.abs()).max().unwrap() / pu.iter().map(|x| x.abs()).max().unwrap();
                let fibers = (0..rng.gen_range(1..=3))
                    .map(|_| random_fiber(rng, &pu, k as usize, 6))
                    .filter(|f| (k as usize).is_multiple_of(f.period()))
                    .collect();
                ConfigView::Fibers(FiberSum::new(2, fibers).unwrap())
            } else {
                let b = random_nonzero(rng, 2, 3);
                if rank_rational(&[u.clone(), b.clone()]) < 2 {
                    continue;
                }
                ConfigView::Periodic(PeriodicConfig::from_fn(vec![u.clone(), b], |_| big(rng.gen_range(-3..=3))).unwrap())
            };
            break (v, u, SubspaceBasis::trivial(2), cprime, Region::centered(2, 20));
        }
        let w = random_nonzero(rng, 3, 2);
        let b = random_nonzero(rng, 3, 2);
        if rank_rational(&[v.clone(), u.clone(), w.clone()]) < 3 || rank_rational(&[u.clone(), w.clone(), b.clone()]) < 3 {
            continue;
        }
        let p = PeriodicConfig::from_fn(vec![u.clone(), w.clone(), b], |_| big(rng.gen_range(-3..=3))).unwrap();
        let window = Region::new(iv(&[-20, -20, 0]), iv(&[20, 20, 0])).unwrap();
        break (v, u, SubspaceBasis::spanned_by(3, &[w]), ConfigView::Periodic(p), window);
    };
    let phi = LaurentPoly::difference(&v).unwrap();
    let psi = LaurentPoly::difference(&u).unwrap();
    let source: Eval = Arc::new(cprime.clone());
    let sol = solve_transfer(&phi, &psi, &source, &space, &Bounds::default().check_region(d))
        .map_err(|e| format!("instance {i}: {e}"))?;
    let n = sol.band_width() as i64;
    let c = |x: &IntVector| sol_eval(&sol, x);
    for x in window.points() {
        let value = c(&x);
        ensure(value.is_integer(), || format!("instance {i}: c({x}) = {value} is not an integer"))?;
        let b = sol.band_coordinate(&x).map_err(|e| e.to_string())?;
        if (0..n).contains(&b) {
            ensure(value.is_zero(), || format!("instance {i}: band point {x} has value {value}"))?;
        }
        let target = BigRational::from_integer(cprime.evaluate(&x).unwrap());
        let lhs = naive_act(&phi, &c, &x);
        ensure(lhs == target, || format!("instance {i}: (φc)({x}) = {lhs}, c'({x}) = {target}"))?;
        let zero = naive_act(&psi, &c, &x);
        ensure(zero.is_zero(), || format!("instance {i}: (ψc)({x}) = {zero}"))?;
    }
    Ok(())
}

fn sol_eval(sol: &perdec::decompose::TransferSolution, x: &IntVector) -> BigRational {
    perdec::Evaluator::eval(sol, x).expect("transfer solution is total")
}

fn transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..100 {
        transfer_instance(&mut rng, i)?;
    }
    Ok("100 instances, 41×41 windows".into())
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let region = Region::new(iv(&[-30, -30]), iv(&[29, 29])).unwrap();
    let mut total = 0;
    for i in 0..50 {
        let m = rng.gen_range(1..=3);
        let mut pool = DIRS2.to_vec();
        pool.shuffle(&mut rng);
        let mut vs = Vec::new();
        let mut parts: Vec<Eval> = Vec::new();
        for p in pool.iter().take(m) {
            let p = iv(p);
            let k = rng.gen_range(1..=3);
            let modulus = rng.gen_range(1..=4);
            let table: Vec<i64> = (0..k * modulus).map(|_| rng.gen_range(-3..=3)).collect();
            let normal = iv(&[-p[1], p[0]]);
            let q = bezout(&p);
            // Constant-free along p up to the position of x on its line mod k.
            parts.push(FnEvaluator::shared(2, format!("part along {p}"), move |x| {
                let a = dot(&normal, x).rem_euclid(modulus);
                let b = dot(&q, x).rem_euclid(k);
                big(table[(a * k + b) as usize])
            }));
            vs.push(p.scale(k));
        }
        let parts_c = parts.clone();
        let c = FnEvaluator::shared(2, "sum", move |x| {
            parts_c.iter().map(|p| p.eval(x).unwrap().to_integer()).sum()
        });
        let phis: Vec<LaurentPoly> = vs.iter().map(|v| LaurentPoly::difference(v).unwrap()).collect();
        let dec = decompose_product(&phis, &c, &SubspaceBasis::trivial(2), &Bounds::default())
            .map_err(|e| format!("instance {i}: {e}"))?;
        ensure(dec.len() == m, || format!("instance {i}: {} components for {m} factors", dec.len()))?;
        for x in region.points() {
            let sum: BigRational = dec
                .components
                .iter()
                .map(|comp| comp.evaluator.eval(&x).unwrap())
                .fold(BigRational::zero(), |a, b| a + b);
            let want = c.eval(&x).unwrap();
            ensure(sum == want, || format!("instance {i}: Σ c_i({x}) = {sum}, c({x}) = {want}"))?;
        }
        for (j, (comp, phi)) in dec.components.iter().zip(&phis).enumerate() {
            let ev = |x: &IntVector| comp.evaluator.eval(x).unwrap();
            for x in region.points() {
                let r = naive_act(phi, &ev, &x);
                ensure(r.is_zero(), || format!("instance {i}: (φ_{j} c_{j})({x}) = {r}"))?;
            }
        }
        total += m;
    }
    Ok(format!("50 instances, {total} components, 60×60 windows"))
}

struct SparseCase {
    families: Vec<FiberSum>,
    total: FiberSum,
    annihilator: LaurentPoly,
}

fn sparse_cases() -> Vec<SparseCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out = Vec::new();
    while out.len() < 100 {
        let n = rng.gen_range(2..=3);
        let mut pool = DIRS2.to_vec();
        pool.shuffle(&mut rng);
        let mut families = Vec::new();
        let mut vectors = Vec::new();
        for p in pool.iter().take(n) {
            let p = iv(p);
            let count = rng.gen_range(1..=6);
            let fibers: Vec<PeriodicFiber> = (0..count).map(|_| random_fiber(&mut rng, &p, 8, 6)).collect();
            let fam = FiberSum::new(2, fibers).unwrap();
            if fam.is_empty() {
                continue;
            }
            let period = fam.period_along(&p).unwrap().unwrap();
            vectors.push(p.scale(period));
            families.push(fam);
        }
        if families.len() < 2 {
            continue;
        }
        let total = families.iter().try_fold(FiberSum::empty(2), |acc, f| acc.add(f)).unwrap();
        let annihilator = LaurentPoly::difference_product(2, &vectors).unwrap();
        out.push(SparseCase {
            families,
            total,
            annihilator,
        });
    }
    out
}

/// Every fiber point over three periods, every crossing neighbourhood and
/// a box around the origin.
fn covering_set(fams: &[FiberSum]) -> Vec<IntVector> {
    let mut pts: Vec<IntVector> = Region::centered(2, 8).points().collect();
    for fam in fams {
        for f in fam.fibers() {
            let p = f.period() as i64;
            pts.extend((-p..2 * p).map(|j| f.point(j)));
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

fn sparse_recovery(cases: &[SparseCase]) -> Outcome {
    let bounds = Bounds::default();
    for (i, case) in cases.iter().enumerate() {
        let got = sparse_full(&ConfigView::Fibers(case.total.clone()), &case.annihilator, &bounds)
            .map_err(|e| format!("case {i}: {e}"))?;
        let got: Vec<FiberSum> = got.into_iter().filter(|s| !s.is_empty()).collect();
        ensure(got.len() == case.families.len(), || {
            format!("case {i}: {} families recovered, {} expected", got.len(), case.families.len())
        })?;
        let pts = covering_set(&case.families);
        for fam in &case.families {
            let dir = fam.directions().into_iter().next().unwrap();
            let rec = got
                .iter()
                .find(|s| s.directions().into_iter().next().as_ref() == Some(&dir))
                .ok_or_else(|| format!("case {i}: no family along {dir}"))?;
            for x in &pts {
                ensure(rec.value(x) == fam.value(x), || {
                    format!("case {i}: family along {dir} differs at {x}")
                })?;
            }
            ensure(rec == fam, || format!("case {i}: family along {dir} differs structurally"))?;
        }
    }
    Ok(format!("{} fiber sums", cases.len()))
}

fn checkerboard_tiling() -> Outcome {
    let tiles = [
        Tile::new(2, vec![iv(&[0, 0]), iv(&[1, 0])]).unwrap(),
        Tile::new(2, vec![iv(&[0, 0]), iv(&[0, 1])]).unwrap(),
    ];
    let cb = PeriodicConfig::checkerboard();
    let view = ConfigView::Periodic(cb.clone());
    let ind = independent(&tiles).map_err(|e| e.to_string())?;
    ensure(matches!(ind, Independence::Independent), || format!("tiles reported dependent: {ind:?}"))?;
    for t in &tiles {
        let v = verify_cotiler(t, &view).map_err(|e| e.to_string())?;
        ensure(v == Verdict::Exact(true), || format!("checkerboard is not a co-tiler of {t:?}: {v}"))?;
    }
    let dec = cotiler_decompose(&tiles, &view, &Bounds::default()).map_err(|e| e.to_string())?;
    let region = Region::new(iv(&[-20, -20]), iv(&[19, 19])).unwrap();
    for x in region.points() {
        let sum: BigRational = dec
            .components
            .iter()
            .map(|c| c.evaluator.eval(&x).unwrap())
            .fold(BigRational::zero(), |a, b| a + b);
        let want = BigRational::from_integer(cb.value(&x).clone());
        ensure(sum == want, || format!("Σ c_i({x}) = {sum}, checkerboard = {want}"))?;
    }
    for (j, comp) in dec.components.iter().enumerate() {
        ensure(rank_rational(&comp.periods) == 2, || {
            format!("component {j} has periods {:?}", comp.periods)
        })?;
        for p in &comp.periods {
            for x in region.points() {
                ensure(comp.evaluator.eval(&(&x + p)).unwrap() == comp.evaluator.eval(&x).unwrap(), || {
                    format!("component {j} is not {p}-periodic at {x}")
                })?;
            }
        }
    }
    Ok(format!("{} components on 40×40", dec.len()))
}

fn oracle_differential() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        let d = rng.gen_range(1..=3);
        let f = random_poly(&mut rng, d, 4);
        let view = match i % 3 {
            0 => {
                let r = if d == 3 { 4 } else { 7 };
                let lo: Vec<i64> = (0..d).map(|_| rng.gen_range(-r..=0)).collect();
                let hi: Vec<i64> = lo.iter().map(|l| l + rng.gen_range(0..=2 * r)).collect();
                let region = Region::new(IntVector::new(lo), IntVector::new(hi)).unwrap();
                ConfigView::Window(WindowConfig::from_fn(region, |_| Ok(big(rng.gen_range(-5..=5)))).unwrap())
            }
            1 => ConfigView::Periodic(
                PeriodicConfig::from_fn(random_hnf(&mut rng, d, 16), |_| big(rng.gen_range(-5..=5))).unwrap(),
            ),
            _ => ConfigView::Fibers(random_fibersum(&mut rng, d)),
        };
        let out = view.apply_poly(&f);
        if let ConfigView::Window(w) = &view {
            if naive_window(&f, w).is_empty() {
                // The stencil does not fit anywhere; no output exists.
                ensure(out.is_err(), || format!("instance {i}: expected an empty-window error"))?;
                continue;
            }
        }
        let out = out.map_err(|e| format!("instance {i}: {e}"))?;
        match &view {
            ConfigView::Window(w) => {
                let want = naive_window(&f, w);
                let got_region = out.domain().cloned();
                ensure(
                    want.iter().all(|(x, _)| got_region.as_ref().is_some_and(|r| r.contains(x))),
                    || format!("instance {i}: output window too small"),
                )?;
                ensure(got_region.map_or(0, |r| r.size()) == want.len(), || {
                    format!("instance {i}: output window too large")
                })?;
                for (x, v) in want {
                    ensure(out.evaluate(&x).unwrap() == v, || format!("instance {i}: differs at {x}"))?;
                }
            }
            _ => {
                // Rasterize the input around the output box, convolve naively.
                let r = 4;
                let outer = Region::centered(d, r + 4);
                let raster = view.rasterize(&outer).unwrap();
                let inner = Region::centered(d, r);
                for (x, v) in naive_window(&f, &raster) {
                    if inner.contains(&x) {
                        ensure(out.evaluate(&x).unwrap() == v, || format!("instance {i}: differs at {x}"))?;
                    }
                }
            }
        }
    }
    Ok("500 instances".into())
}

fn sparseness(cases: &[SparseCase]) -> Outcome {
    let plane = ConfigView::Periodic(PeriodicConfig::constant(2, 1));
    let witness = match check_sparseness(&plane, 3, 10).map_err(|e| e.to_string())? {
        SparsenessCheck::Violated { m, t, count } => {
            let direct = Region::centered(2, m as i64).translate(&t).size() as u64;
            ensure(direct == count && count > 3 * m, || format!("bogus violation at m = {m}, t = {t}"))?;
            format!("m = {m}, t = {t}")
        }
        other => return Err(format!("constant plane certified: {other:?}")),
    };
    for (i, case) in cases.iter().enumerate() {
        let s = &case.total;
        let a = s.sparseness_constant();
        let res = check_sparseness(&ConfigView::Fibers(s.clone()), a, 3).map_err(|e| e.to_string())?;
        ensure(res.certificate().is_some_and(|c| c.exact), || {
            format!("case {i}: not certified at a = {a}: {res:?}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..100 {
        let (a, b) = (random_fibersum(&mut rng, 2), random_fibersum(&mut rng, 2));
        let sum = a.add(&b).unwrap();
        let bound = a.sparseness_constant() + b.sparseness_constant();
        ensure(sum.sparseness_constant() <= bound, || format!("pair {i}: constant of the sum exceeds the bound"))?;
        let res = check_sparseness(&ConfigView::Fibers(sum), bound, 4).map_err(|e| e.to_string())?;
        ensure(res.certified(), || format!("pair {i}: sum violates a + b: {res:?}"))?;
    }
    Ok(format!("plane violated at {witness}; {} certificates; 100 pairs", cases.len()))
}

// ---------------------------------------------------------------------------

fn run(n: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    let slow = limit.is_some_and(|l| took > l);
    let budget = limit.map_or(String::new(), |l| format!(" / {} s", l.as_secs()));
    let ok = result.is_ok() && !slow;
    let detail = match (&result, slow) {
        (Ok(msg), false) => msg.clone(),
        (Ok(msg), true) => format!("{msg}; over the time limit"),
        (Err(msg), _) => msg.clone(),
    };
    println!(
        "{} {n}. {name} ({:.2} s{budget}): {detail}",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64()
    );
    ok
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let secs = Duration::from_secs;
    let cases = sparse_cases();
    let results = [
        run(1, "ring laws", Some(secs(5)), ring_laws),
        run(2, "annihilation iff periodicity", Some(secs(10)), annihilation_periodicity),
        run(3, "transfer solutions", Some(secs(30)), transfer),
        run(4, "decomposition round trip", Some(secs(60)), round_trip),
        run(5, "sparse recovery", Some(secs(60)), || sparse_recovery(&cases)),
        run(6, "checkerboard tiling", Some(secs(5)), checkerboard_tiling),
        run(7, "oracle differential", None, oracle_differential),
        run(8, "sparseness certificates", None, || sparseness(&cases)),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
