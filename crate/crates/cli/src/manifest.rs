//! The run manifest: what was read, what was checked, what was written.

use std::fs;
use std::path::{Path, PathBuf};

use perdec::{json, Bounds, Error, Result, Verdict};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Inconclusive => 2,
            Status::Fail => 1,
        }
    }
}

pub struct Run {
    command: String,
    arguments: Vec<String>,
    out_dir: PathBuf,
    bounds: Bounds,
    inputs: Vec<Value>,
    checks: Vec<(String, Status, String)>,
    outputs: Vec<String>,
    extra: Vec<(String, Value)>,
}

impl Run {
    pub fn new(command: &str, arguments: Vec<String>, out_dir: PathBuf, bounds: Bounds) -> Self {
        Run {
            command: command.into(),
            arguments,
            out_dir,
            bounds,
            inputs: Vec::new(),
            checks: Vec::new(),
            outputs: Vec::new(),
            extra: Vec::new(),
        }
    }

    /// Reads and parses a JSON input, recording its hash. Errors name the file.
    pub fn load(&mut self, path: &Path) -> Result<Value> {
        let bytes = fs::read(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        self.inputs.push(json!({
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(&bytes)),
        }));
        let text = String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{}: not UTF-8", path.display())))?;
        json::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    /// Parses a loaded input, putting the file name in front of any error.
    pub fn read<T>(&mut self, path: &Path, parse: impl FnOnce(&Value) -> Result<T>) -> Result<T> {
        let v = self.load(path)?;
        parse(&v).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push((name.into(), status, detail.into()));
    }

    pub fn verdict(&mut self, name: impl Into<String>, v: &Verdict) {
        let status = if v.holds() { Status::Pass } else { Status::Fail };
        self.check(name, status, v.to_string());
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.extra.push((key.into(), value));
    }

    /// Writes `name` under the output directory and records it.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| Error::Invalid(format!("{}: {e}", self.out_dir.display())))?;
        let path = self.out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        self.write(name, &json::to_string(value))
    }

    /// Overall status: the worst check, or the error's kind.
    pub fn status(&self, error: Option<&Error>) -> Status {
        match error {
            Some(e) if e.is_inconclusive() => Status::Inconclusive,
            Some(_) => Status::Fail,
            None => self.checks.iter().map(|c| c.1).max().unwrap_or(Status::Pass),
        }
    }

    /// Writes `manifest.json` and returns the overall status.
    pub fn finish(mut self, error: Option<&Error>, wall_ms: u128) -> Status {
        let status = self.status(error);
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|(name, s, detail)| json!({"check": name, "status": s.as_str(), "detail": detail}))
            .collect();
        let mut m = json!({
            "command": self.command,
            "arguments": self.arguments,
            "inputs": self.inputs,
            "bounds": {
                "search": self.bounds.search,
                "period": self.bounds.period,
                "k_max": self.bounds.k_max,
                "patience": self.bounds.patience,
                "check_radius": self.bounds.check_radius,
            },
            "verdicts": checks,
            "outputs": self.outputs,
            "status": status.as_str(),
        });
        let obj = m.as_object_mut().expect("object");
        for (k, v) in std::mem::take(&mut self.extra) {
            obj.insert(k, v);
        }
        if let Some(e) = error {
            obj.insert("error".into(), Value::String(e.to_string()));
        }
        obj.insert("wall_time_ms".into(), json!(wall_ms as u64));
        let path = self.out_dir.join("manifest.json");
        let written = fs::create_dir_all(&self.out_dir).and_then(|_| fs::write(&path, json::to_string(&m)));
        if let Err(e) = written {
            eprintln!("perdec: cannot write {}: {e}", path.display());
            return Status::Fail;
        }
        status
    }
}
