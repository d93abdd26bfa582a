//! Writing results: float rounding, files or stdout, and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use northcott_core::Error;

/// `x` with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.11e}");
    let v: f64 = s.parse().expect("round trip");
    format!("{v}")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            if let Some(r) = serde_json::Number::from_f64(sig12(x).parse().unwrap()) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("results serialize");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Digest256 {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command_line: Vec<String>,
    version: &'static str,
    inputs: Vec<Digest256>,
    outputs: Vec<Digest256>,
    wall_seconds: f64,
}

/// Tracks inputs read and outputs written by one command.
pub struct Run {
    started: Instant,
    inputs: Vec<Digest256>,
    outputs: Vec<Digest256>,
}

impl Run {
    pub fn new() -> Self {
        Run { started: Instant::now(), inputs: Vec::new(), outputs: Vec::new() }
    }

    pub fn read(&mut self, path: &Path) -> Result<String, Error> {
        let bytes = fs::read(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        self.inputs.push(Digest256 { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).map_err(|_| Error::InvalidInput(format!("{} is not UTF-8", path.display())))
    }

    /// Writes to `out`, or stdout when absent.
    pub fn emit(&mut self, out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
        match out {
            Some(path) => {
                fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                self.outputs.push(Digest256 { path: path.display().to_string(), sha256: sha256_hex(text.as_bytes()) });
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    /// `<first output>.manifest.json`, written only when some file output exists.
    pub fn finish(self) -> Result<(), Error> {
        let Some(first) = self.outputs.first() else {
            return Ok(());
        };
        let path = format!("{}.manifest.json", first.path);
        let manifest = RunManifest {
            command_line: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION"),
            wall_seconds: self.started.elapsed().as_secs_f64(),
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        fs::write(&path, text).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))
    }
}
