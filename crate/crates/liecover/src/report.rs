//! CSV artifacts and the `run.json` manifest.
//!
//! Every CSV starts with `# config_hash=<sha256> seed=<seed>`, then a header
//! row. Numbers use shortest round-trip formatting; missing values are `NA`.
//! Warnings are appended as `# warning: ...` lines.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub warnings: Vec<String>,
}

impl Table {
    pub fn new(file: &str, header: &[&'static str]) -> Self {
        Self { file: file.into(), header: header.to_vec(), rows: Vec::new(), warnings: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, prov: &Provenance) -> io::Result<Vec<u8>> {
        let mut out = format!("# config_hash={} seed={}\n", prov.config_hash, prov.seed).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        for warning in &self.warnings {
            out.extend_from_slice(format!("# warning: {warning}\n").as_bytes());
        }
        Ok(out)
    }
}

/// Shortest round-trip text; scientific outside `[1e-4, 1e15)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), num)
}

pub fn flag(b: bool) -> String {
    b.to_string()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub name: String,
    pub wall_ms: f64,
    pub exit_code: u8,
}

/// Schema of `run.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub artifacts: Vec<Artifact>,
    pub steps: Vec<Step>,
    pub notes: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub exit_code: u8,
}

pub fn write_table(dir: &Path, table: &Table, prov: &Provenance) -> io::Result<Artifact> {
    let bytes = table.render(prov)?;
    std::fs::write(dir.join(&table.file), &bytes)?;
    Ok(Artifact { file: table.file.clone(), sha256: sha256_hex(&bytes), rows: table.rows.len() })
}

pub fn write_text(dir: &Path, file: &str, text: &str) -> io::Result<Artifact> {
    std::fs::write(dir.join(file), text.as_bytes())?;
    Ok(Artifact { file: file.into(), sha256: sha256_hex(text.as_bytes()), rows: text.lines().count() })
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(dir.join("run.json"), text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, -2.5, 1e-300, 6.02e23, 0.1 + 0.2, 1e-4, 1e15, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(1.5e-20), "1.5e-20");
        assert_eq!(num(12.25), "12.25");
    }

    #[test]
    fn render_has_provenance_header_and_warnings() {
        let mut t = Table::new("x.csv", &["a", "b"]);
        t.push(vec![num(0.1), opt(None)]);
        t.warnings.push("nothing valid".into());
        let text = String::from_utf8(t.render(&Provenance { config_hash: "ab".into(), seed: 7 }).unwrap()).unwrap();
        assert_eq!(text, "# config_hash=ab seed=7\na,b\n0.1,NA\n# warning: nothing valid\n");
    }
}
