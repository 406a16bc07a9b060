//! JSON forms of polynomials, configurations, tiles and subspaces.
//!
//! Integers are JSON numbers of any size. Parsers reject anything that
//! would not round-trip: zero or repeated terms, wrong lengths, missing or
//! extra residues, non-primitive fiber directions. Errors name the JSON
//! path of the offending value.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Number, Value};

use crate::config::{ConfigView, FiberSum, PeriodicConfig, PeriodicFiber, Region, WindowConfig};
use crate::error::{Error, Result};
use crate::lattice::{primitive, SubspaceBasis};
use crate::laurent::LaurentPoly;
use crate::tiling::Tile;
use crate::vector::IntVector;

/// Parses JSON text; syntax errors carry line and column.
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Pretty-printed, with a trailing newline.
pub fn to_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.as_object()
        .ok_or_else(|| err(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| err(path, format!("missing field \"{key}\"")))
}

fn only_fields(obj: &Value, keys: &[&str], path: &str) -> Result<()> {
    let map = obj.as_object().ok_or_else(|| err(path, "expected an object"))?;
    for k in map.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(err(path, format!("unexpected field \"{k}\"")));
        }
    }
    Ok(())
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn big(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string()).map_err(|_| err(path, format!("{n} is not an integer"))),
        _ => Err(err(path, "expected an integer")),
    }
}

fn small(v: &Value, path: &str) -> Result<i64> {
    i64::try_from(big(v, path)?).map_err(|_| err(path, "integer out of range"))
}

fn dim(obj: &Value, path: &str) -> Result<usize> {
    let d = small(field(obj, "dim", path)?, &format!("{path}.dim"))?;
    if d < 1 {
        return Err(err(path, "dim must be positive"));
    }
    Ok(d as usize)
}

fn vector(v: &Value, d: usize, path: &str) -> Result<IntVector> {
    let a = array(v, path)?;
    if a.len() != d {
        return Err(err(path, format!("expected {d} coordinates, found {}", a.len())));
    }
    let coords = a
        .iter()
        .enumerate()
        .map(|(i, x)| small(x, &format!("{path}[{i}]")))
        .collect::<Result<_>>()?;
    Ok(IntVector::new(coords))
}

fn num(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integers are JSON numbers"))
}

fn vec_json(v: &IntVector) -> Value {
    json!(v.coords())
}

fn kind<'a>(obj: &'a Value, path: &str) -> Result<&'a str> {
    field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| err(&format!("{path}.kind"), "expected a string"))
}

pub fn poly_to_json(f: &LaurentPoly) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|(e, k)| json!({"exp": vec_json(e), "coef": num(k)}))
        .collect();
    json!({"dim": f.dim(), "terms": terms})
}

pub fn poly_from_json(v: &Value) -> Result<LaurentPoly> {
    let path = "$";
    only_fields(v, &["dim", "terms"], path)?;
    let d = dim(v, path)?;
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    for (i, t) in array(field(v, "terms", path)?, "$.terms")?.iter().enumerate() {
        let p = format!("$.terms[{i}]");
        only_fields(t, &["exp", "coef"], &p)?;
        let e = vector(field(t, "exp", &p)?, d, &format!("{p}.exp"))?;
        let k = big(field(t, "coef", &p)?, &format!("{p}.coef"))?;
        if k.is_zero() {
            return Err(err(&p, "zero coefficient"));
        }
        if !seen.insert(e.clone()) {
            return Err(err(&p, format!("duplicate exponent {e}")));
        }
        terms.push((e, k));
    }
    LaurentPoly::from_terms(d, terms)
}

pub fn config_to_json(c: &ConfigView) -> Value {
    match c {
        ConfigView::Window(w) => window_to_json(w),
        ConfigView::Periodic(p) => {
            let values: Vec<Value> = p
                .values()
                .iter()
                .map(|(r, v)| json!({"res": vec_json(r), "val": num(v)}))
                .collect();
            let basis: Vec<Value> = p.declared_basis().iter().map(vec_json).collect();
            json!({"kind": "periodic", "dim": p.dim(), "basis": basis, "values": values})
        }
        ConfigView::Fibers(s) => fibers_to_json(s),
    }
}

pub fn window_to_json(w: &WindowConfig) -> Value {
    let values: Vec<Value> = w.values().iter().map(num).collect();
    json!({"kind": "window", "dim": w.dim(), "lo": vec_json(w.lo()), "hi": vec_json(w.hi()), "values": values})
}

pub fn fibers_to_json(s: &FiberSum) -> Value {
    let fibers: Vec<Value> = s
        .fibers()
        .iter()
        .map(|f| {
            let vals: Vec<Value> = f.vals().iter().map(num).collect();
            json!({"anchor": vec_json(f.anchor()), "dir": vec_json(f.direction()), "period": f.period(), "vals": vals})
        })
        .collect();
    json!({"kind": "fibersum", "dim": s.dim(), "fibers": fibers})
}

pub fn config_from_json(v: &Value) -> Result<ConfigView> {
    let path = "$";
    let d = dim(v, path)?;
    match kind(v, path)? {
        "window" => {
            only_fields(v, &["kind", "dim", "lo", "hi", "values"], path)?;
            let lo = vector(field(v, "lo", path)?, d, "$.lo")?;
            let hi = vector(field(v, "hi", path)?, d, "$.hi")?;
            let region = Region::new(lo.clone(), hi.clone()).map_err(|e| err(path, e))?;
            let vals = array(field(v, "values", path)?, "$.values")?;
            if vals.len() != region.size() {
                return Err(err("$.values", format!("expected {} values, found {}", region.size(), vals.len())));
            }
            let values = vals
                .iter()
                .enumerate()
                .map(|(i, x)| big(x, &format!("$.values[{i}]")))
                .collect::<Result<_>>()?;
            Ok(ConfigView::Window(WindowConfig::new(lo, hi, values)?))
        }
        "periodic" => {
            only_fields(v, &["kind", "dim", "basis", "values"], path)?;
            let basis = array(field(v, "basis", path)?, "$.basis")?
                .iter()
                .enumerate()
                .map(|(i, b)| vector(b, d, &format!("$.basis[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            if basis.len() != d {
                return Err(err("$.basis", format!("expected {d} basis vectors, found {}", basis.len())));
            }
            let mut values = BTreeMap::new();
            for (i, e) in array(field(v, "values", path)?, "$.values")?.iter().enumerate() {
                let p = format!("$.values[{i}]");
                only_fields(e, &["res", "val"], &p)?;
                let r = vector(field(e, "res", &p)?, d, &format!("{p}.res"))?;
                let x = big(field(e, "val", &p)?, &format!("{p}.val"))?;
                if values.insert(r.clone(), x).is_some() {
                    return Err(err(&p, format!("duplicate residue {r}")));
                }
            }
            PeriodicConfig::new(basis, values)
                .map(ConfigView::Periodic)
                .map_err(|e| err("$.values", e))
        }
        "fibersum" => {
            only_fields(v, &["kind", "dim", "fibers"], path)?;
            let mut fibers = Vec::new();
            for (i, f) in array(field(v, "fibers", path)?, "$.fibers")?.iter().enumerate() {
                let p = format!("$.fibers[{i}]");
                only_fields(f, &["anchor", "dir", "period", "vals"], &p)?;
                let anchor = vector(field(f, "anchor", &p)?, d, &format!("{p}.anchor"))?;
                let dir = vector(field(f, "dir", &p)?, d, &format!("{p}.dir"))?;
                if dir.is_zero() || primitive(&dir)? != dir {
                    return Err(err(&format!("{p}.dir"), "direction must be primitive with first nonzero coordinate positive"));
                }
                let period = small(field(f, "period", &p)?, &format!("{p}.period"))?;
                let vals: Vec<BigInt> = array(field(f, "vals", &p)?, &format!("{p}.vals"))?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| big(x, &format!("{p}.vals[{j}]")))
                    .collect::<Result<_>>()?;
                if period < 1 || period as usize != vals.len() {
                    return Err(err(&format!("{p}.period"), format!("period {period} but {} values", vals.len())));
                }
                fibers.push(PeriodicFiber::new(anchor, dir, vals).map_err(|e| err(&p, e))?);
            }
            Ok(ConfigView::Fibers(FiberSum::new(d, fibers)?))
        }
        other => Err(err("$.kind", format!("unknown kind \"{other}\""))),
    }
}

pub fn tile_to_json(t: &Tile) -> Value {
    let cells: Vec<Value> = t.cells().iter().map(vec_json).collect();
    json!({"dim": t.dim(), "cells": cells})
}

pub fn tile_from_json(v: &Value) -> Result<Tile> {
    only_fields(v, &["dim", "cells"], "$")?;
    let d = dim(v, "$")?;
    let cells = array(field(v, "cells", "$")?, "$.cells")?
        .iter()
        .enumerate()
        .map(|(i, c)| vector(c, d, &format!("$.cells[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Tile::new(d, cells).map_err(|e| err("$.cells", e))
}

pub fn subspace_to_json(s: &SubspaceBasis) -> Value {
    let basis: Vec<Value> = s
        .basis()
        .iter()
        .map(|b| Value::Array(b.iter().map(|q| Value::String(format!("{}/{}", q.numer(), q.denom()))).collect()))
        .collect();
    json!({"dim": s.ambient_dim(), "basis": basis})
}

fn rational(v: &Value, path: &str) -> Result<BigRational> {
    let s = v.as_str().ok_or_else(|| err(path, "expected a \"p/q\" string"))?;
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p = BigInt::from_str(p.trim()).map_err(|_| err(path, format!("bad numerator in {s:?}")))?;
    let q = BigInt::from_str(q.trim()).map_err(|_| err(path, format!("bad denominator in {s:?}")))?;
    if q.is_zero() {
        return Err(err(path, "zero denominator"));
    }
    Ok(BigRational::new(p, q))
}

pub fn subspace_from_json(v: &Value) -> Result<SubspaceBasis> {
    only_fields(v, &["dim", "basis"], "$")?;
    let d = dim(v, "$")?;
    let mut basis = Vec::new();
    for (i, b) in array(field(v, "basis", "$")?, "$.basis")?.iter().enumerate() {
        let p = format!("$.basis[{i}]");
        let a = array(b, &p)?;
        if a.len() != d {
            return Err(err(&p, format!("expected {d} coordinates, found {}", a.len())));
        }
        basis.push(
            a.iter()
                .enumerate()
                .map(|(j, x)| rational(x, &format!("{p}[{j}]")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    SubspaceBasis::new(d, basis).map_err(|e| err("$.basis", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iv;
    use proptest::prelude::*;

    #[test]
    fn poly_round_trip_and_rejections() {
        let f = LaurentPoly::difference_product(2, &[iv![1, 0], iv![0, 1]]).unwrap();
        let v = poly_to_json(&f);
        assert_eq!(poly_from_json(&v).unwrap(), f);
        assert_eq!(v["terms"].as_array().unwrap().len(), 4);

        let zero = parse(r#"{"dim":2,"terms":[{"exp":[0,0],"coef":0}]}"#).unwrap();
        assert!(poly_from_json(&zero).unwrap_err().to_string().contains("$.terms[0]"));
        let dup = parse(r#"{"dim":1,"terms":[{"exp":[1],"coef":1},{"exp":[1],"coef":2}]}"#).unwrap();
        assert!(poly_from_json(&dup).is_err());
        let short = parse(r#"{"dim":2,"terms":[{"exp":[1],"coef":1}]}"#).unwrap();
        assert!(poly_from_json(&short).is_err());
        let huge = parse(r#"{"dim":1,"terms":[{"exp":[0],"coef":123456789012345678901234567890}]}"#).unwrap();
        let g = poly_from_json(&huge).unwrap();
        assert_eq!(poly_to_json(&g), huge);
    }

    #[test]
    fn syntax_errors_have_lines() {
        let e = parse("{\n  \"dim\": 2,\n  oops\n}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn configs_round_trip() {
        let cb = ConfigView::Periodic(PeriodicConfig::checkerboard());
        assert_eq!(config_from_json(&config_to_json(&cb)).unwrap(), cb);
        let w = cb.rasterize(&Region::new(iv![-1, 0], iv![2, 1]).unwrap()).unwrap();
        let wv = ConfigView::Window(w);
        assert_eq!(config_from_json(&config_to_json(&wv)).unwrap(), wv);
        let s = ConfigView::Fibers(
            FiberSum::new(
                2,
                vec![PeriodicFiber::new(iv![3, 1], iv![1, -1], vec![1.into(), 0.into(), 2.into()]).unwrap()],
            )
            .unwrap(),
        );
        assert_eq!(config_from_json(&config_to_json(&s)).unwrap(), s);

        let missing = parse(r#"{"kind":"periodic","dim":1,"basis":[[2]],"values":[{"res":[0],"val":1}]}"#).unwrap();
        assert!(config_from_json(&missing).is_err());
        let bad_dir = parse(r#"{"kind":"fibersum","dim":2,"fibers":[{"anchor":[0,0],"dir":[2,0],"period":1,"vals":[1]}]}"#).unwrap();
        assert!(config_from_json(&bad_dir).unwrap_err().to_string().contains("$.fibers[0].dir"));
        let bad_len = parse(r#"{"kind":"window","dim":1,"lo":[0],"hi":[2],"values":[1,2]}"#).unwrap();
        assert!(config_from_json(&bad_len).is_err());
    }

    #[test]
    fn tiles_and_subspaces() {
        let t = Tile::new(2, vec![iv![0, 0], iv![1, 0]]).unwrap();
        assert_eq!(tile_from_json(&tile_to_json(&t)).unwrap(), t);
        let s = SubspaceBasis::from_vectors(3, &[iv![1, 2, 0], iv![0, 0, 3]]).unwrap();
        let back = subspace_from_json(&subspace_to_json(&s)).unwrap();
        assert!(back.same_subspace(&s));
        let v = parse(r#"{"dim":2,"basis":[["1/2","-3"]]}"#).unwrap();
        assert!(subspace_from_json(&v).unwrap().contains(&iv![1, -6]));
    }

    proptest! {
        #[test]
        fn random_polys_round_trip(f in crate::laurent::tests::arb_poly(3)) {
            let text = to_string(&poly_to_json(&f));
            prop_assert_eq!(poly_from_json(&parse(&text).unwrap()).unwrap(), f);
        }
    }
}
