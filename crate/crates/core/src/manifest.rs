//! Run manifests: a flat key-value record of everything needed to reproduce
//! an output (tool version, input digests, per-stage config hashes, seeds,
//! timings). Written next to the primary output as `<output>.manifest`; the
//! `manifest_hash` entry identifies the run.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

#[derive(Debug, Default, Clone)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

pub fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(s, "{b:02x}").unwrap();
    }
    s
}

pub fn file_digest(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(hex(&h.finalize()))
}

impl RunManifest {
    pub fn new(command: &str) -> RunManifest {
        let mut m = RunManifest::default();
        m.set("tool", format!("edm {}", env!("CARGO_PKG_VERSION")));
        m.set("command", command);
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn add_file(&mut self, label: &str, path: &Path) -> std::io::Result<()> {
        self.set(&format!("{label}.path"), path.display());
        self.set(&format!("{label}.sha256"), file_digest(path)?);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn body(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    /// Hash over the manifest body, excluding the hash line itself.
    pub fn manifest_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.body().as_bytes());
        hex(&h.finalize())
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut body = self.body();
        writeln!(body, "manifest_hash={}", self.manifest_hash()).unwrap();
        std::fs::write(path, body)
    }
}
