use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

const CHECKERBOARD: &str = r#"{"kind": "periodic", "dim": 2, "basis": [[2, 0], [0, 2]], "values": [
  {"res": [0, 0], "val": 1}, {"res": [0, 1], "val": 0}, {"res": [1, 0], "val": 0}, {"res": [1, 1], "val": 1}]}"#;

struct Sandbox {
    dir: TempDir,
}

struct Outcome {
    code: i32,
    stderr: String,
    out: PathBuf,
}

impl Outcome {
    fn json(&self, name: &str) -> Value {
        let text = fs::read_to_string(self.out.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        serde_json::from_str(&text).unwrap()
    }

    fn manifest(&self) -> Value {
        self.json("manifest.json")
    }
}

fn poly(d: usize, terms: &[(&[i64], i64)]) -> String {
    let terms: Vec<Value> = terms.iter().map(|(e, c)| json!({"exp": e, "coef": c})).collect();
    json!({"dim": d, "terms": terms}).to_string()
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: &str) -> String {
        fs::write(self.dir.path().join(name), contents).unwrap();
        name.to_string()
    }

    fn run(&self, out: &str, args: &[&str]) -> Outcome {
        let o = Command::new(env!("CARGO_BIN_EXE_perdec"))
            .current_dir(self.dir.path())
            .args(["--out", out])
            .args(args)
            .output()
            .unwrap();
        Outcome {
            code: o.status.code().unwrap(),
            stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
            out: self.dir.path().join(out),
        }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }
}

#[test]
fn poly_arithmetic() {
    let s = Sandbox::new();
    let f = s.file("f.json", &poly(2, &[(&[1, 0], 1), (&[0, 0], -1)]));
    let g = s.file("g.json", &poly(2, &[(&[0, 1], 1), (&[0, 0], -1)]));
    let r = s.run("mul", &["poly", "mul", &f, &g]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json("result.json")["terms"].as_array().unwrap().len(), 4);

    let neg = s.file("neg.json", &poly(2, &[(&[1, 0], -1), (&[0, 0], 1)]));
    let r = s.run("add", &["poly", "add", &f, &neg]);
    assert_eq!(r.json("result.json"), json!({"dim": 2, "terms": []}));

    let mono = s.file("mono.json", &poly(2, &[(&[3, -1], 5)]));
    let r = s.run("line", &["poly", "line-dir", &mono]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json("result.json"), json!({"direction": null}));
    assert_eq!(r.manifest()["verdicts"][0]["detail"], "absent");

    let r = s.run("line2", &["poly", "line-dir", &f]);
    assert_eq!(r.json("result.json")["direction"], json!([1, 0]));
}

#[test]
fn act_on_configurations() {
    let s = Sandbox::new();
    let cb = s.file("cb.json", CHECKERBOARD);
    let tile = s.file("tile.json", &poly(2, &[(&[0, 0], 1), (&[-1, 0], 1)]));
    let r = s.run("tile", &["act", &tile, &cb]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out = r.json("result.json");
    assert!(out["values"].as_array().unwrap().iter().all(|v| v["val"] == 1));

    let one = s.file("one.json", &poly(2, &[(&[0, 0], 1)]));
    let r = s.run("one", &["act", &one, &cb]);
    assert_eq!(r.json("result.json"), serde_json::from_str::<Value>(CHECKERBOARD).unwrap());

    let w = s.file(
        "w.json",
        &json!({"kind": "window", "dim": 2, "lo": [0, 0], "hi": [1, 1], "values": [1, 2, 3, 4]}).to_string(),
    );
    let wide = s.file("wide.json", &poly(2, &[(&[0, 0], 1), (&[5, 0], 1)]));
    let r = s.run("erode", &["act", &wide, &w]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("eroded window is empty"), "{}", r.stderr);
    assert_eq!(r.manifest()["status"], "fail");
}

#[test]
fn decompose_with_search() {
    let s = Sandbox::new();
    let cb = s.file("cb.json", CHECKERBOARD);
    // (X1 - 1)(1 + X1^-1) = X1 - X1^-1.
    let f = s.file("f.json", &poly(2, &[(&[1, 0], 1), (&[-1, 0], -1)]));
    let r = s.run("dec", &["decompose", &cb, "--annihilator", &f, "--search", "--window=-3,-3..3,3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m = r.manifest();
    assert_eq!(m["status"], "pass");
    assert!(m["verdicts"].as_array().unwrap().iter().any(|v| v["check"].as_str().unwrap().starts_with("sum residual")));
    let comp = r.json("component-1.json");
    assert_eq!(comp["windows"][0]["lo"], json!([-3, -3]));

    // Multipliers up to 1 cannot reach the period 2.
    let g = s.file("g.json", &poly(2, &[(&[2, 0], 1), (&[0, 0], -1)]));
    let r = s.run("short", &["--bound-search", "1", "decompose", &cb, "--annihilator", &g, "--search"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert_eq!(r.manifest()["status"], "inconclusive");
}

#[test]
fn sparse_and_tiling() {
    let s = Sandbox::new();
    let cross = json!({"kind": "fibersum", "dim": 2, "fibers": [
        {"anchor": [0, 1], "dir": [1, 0], "period": 2, "vals": [1, 2]},
        {"anchor": [0, 0], "dir": [0, 1], "period": 1, "vals": [5]},
    ]});
    let c = s.file("cross.json", &cross.to_string());
    let f = s.file("f.json", &poly(2, &[(&[2, 1], 1), (&[2, 0], -1), (&[0, 1], -1), (&[0, 0], 1)]));
    let r = s.run("full", &["sparse", "full", &c, &f]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.out.join("family-2.json").exists());

    let r = s.run("check", &["sparse", "check", &c, "--a", "6", "--m-max", "3"]);
    assert_eq!(r.json("sparseness.json")["exact"], true);

    let cb = s.file("cb.json", CHECKERBOARD);
    let plane = s.file("plane.json", r#"{"kind": "periodic", "dim": 2, "basis": [[1, 0], [0, 1]], "values": [{"res": [0, 0], "val": 1}]}"#);
    let r = s.run("dense", &["sparse", "check", &plane, "--a", "3"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json("sparseness.json")["m"], 1);

    let t1 = s.file("t1.json", r#"{"dim": 2, "cells": [[0, 0], [1, 0]]}"#);
    let t2 = s.file("t2.json", r#"{"dim": 2, "cells": [[0, 0], [0, 1]]}"#);
    let r = s.run("verify", &["tiling", "verify", &t1, &cb]);
    assert_eq!(r.json("report.json")["cotiler"], true);
    let r = s.run("ind", &["tiling", "independent", &t1, &t2]);
    assert_eq!(r.code, 0);
    let r = s.run("tdec", &["tiling", "decompose", &cb, &t1, &t2]);
    assert_eq!(r.code, 0, "{}", r.stderr);

    let t3 = s.file("t3.json", r#"{"dim": 2, "cells": [[0, 0], [2, 0]]}"#);
    let r = s.run("dep", &["tiling", "independent", &t1, &t3]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json("report.json")["independent"], false);
}

#[test]
fn errors_are_located() {
    let s = Sandbox::new();
    let bad = s.file("bad.json", "{\n  \"dim\": 2,\n  \"terms\": [\n");
    let cb = s.file("cb.json", CHECKERBOARD);
    let r = s.run("syntax", &["act", &bad, &cb]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("bad.json") && r.stderr.contains("line 4"), "{}", r.stderr);

    let zero = s.file("zero.json", r#"{"dim": 2, "terms": [{"exp": [0, 0], "coef": 0}]}"#);
    let r = s.run("schema", &["act", &zero, &cb]);
    assert!(r.stderr.contains("$.terms[0]"), "{}", r.stderr);

    let f3 = s.file("f3.json", &poly(3, &[(&[0, 0, 0], 1)]));
    let r = s.run("dim", &["act", &f3, &cb]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("dimension mismatch"), "{}", r.stderr);
    let r = s.run("dim2", &["--dim", "3", "act", &f3, &cb]);
    assert!(r.stderr.contains("dimension mismatch"), "{}", r.stderr);
}

#[test]
fn runs_are_deterministic() {
    let s = Sandbox::new();
    let cb = s.file("cb.json", CHECKERBOARD);
    let f = s.file("f.json", &poly(2, &[(&[1, 0], 1), (&[-1, 0], -1)]));
    let args = ["decompose", cb.as_str(), "--annihilator", f.as_str(), "--search"];
    let strip = |p: &Path| -> Vec<(String, String)> {
        let mut files: Vec<_> = fs::read_dir(p)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                let text = fs::read_to_string(e.path()).unwrap();
                let text: String = text.lines().filter(|l| !l.contains("wall_time_ms")).collect();
                (e.file_name().to_string_lossy().into_owned(), text)
            })
            .collect();
        files.sort();
        files
    };
    s.run("det", &args);
    let first = strip(&s.path().join("det"));
    for threads in ["1", "3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_perdec"))
            .current_dir(s.path())
            .env("PERDEC_THREADS", threads)
            .args(["--out", "det"])
            .args(args)
            .output()
            .unwrap();
        assert!(o.status.success());
        assert_eq!(strip(&s.path().join("det")), first);
    }
}
