use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{Experiment, ExperimentConfig};
use crate::{Error, Result};

/// One asserted property of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

/// A CSV file produced by a run, kept in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Table {
    pub fn from_rows<T: Serialize>(name: &str, rows: &[T]) -> Result<Table> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
        Ok(Table { name: name.to_string(), bytes })
    }

    pub fn sha256(&self) -> String {
        hex(&Sha256::digest(&self.bytes))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    /// Free-form lines for the summary (measured constants, verdicts).
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct ManifestRow<'a> {
    experiment: &'a str,
    config_sha256: &'a str,
    modules: &'a str,
    seed: u64,
    file: &'a str,
    file_sha256: String,
    bytes: usize,
}

impl ExperimentReport {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentReport { experiment, checks: vec![], tables: vec![], notes: vec![] }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, detail));
    }

    pub fn summary(&self) -> String {
        let mut s = format!("experiment: {}\n", self.experiment.name());
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        let _ = writeln!(s, "checks: {} passed, {} failed", self.checks.len() - failed, failed);
        for c in &self.checks {
            let _ = writeln!(s, "  [{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        for t in &self.tables {
            let _ = writeln!(s, "  wrote {}", t.name);
        }
        s
    }

    /// Writes every table, `checks.csv`, `summary.txt` and `manifest.csv`.
    pub fn write(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut tables = self.tables.clone();
        tables.push(Table::from_rows("checks.csv", &self.checks)?);
        let config_hash = hex(&Sha256::digest(cfg.to_toml().as_bytes()));
        let modules = module_versions();
        let mut manifest = Vec::new();
        for t in &tables {
            let path = dir.join(&t.name);
            std::fs::write(&path, &t.bytes).map_err(|e| Error::io(&path, e))?;
            manifest.push(ManifestRow {
                experiment: self.experiment.name(),
                config_sha256: &config_hash,
                modules: &modules,
                seed: cfg.seed,
                file: &t.name,
                file_sha256: t.sha256(),
                bytes: t.bytes.len(),
            });
        }
        let m = Table::from_rows("manifest.csv", &manifest)?;
        let path = dir.join(&m.name);
        std::fs::write(&path, &m.bytes).map_err(|e| Error::io(&path, e))?;
        let path = dir.join("summary.txt");
        std::fs::write(&path, self.summary()).map_err(|e| Error::io(&path, e))?;
        let path = dir.join("config.toml");
        std::fs::write(&path, cfg.to_toml()).map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}

fn module_versions() -> String {
    let v = env!("CARGO_PKG_VERSION");
    ["nfunc", "field", "constitutive", "solver", "oscillation", "harness"]
        .iter()
        .map(|m| format!("{m}@{v}"))
        .collect::<Vec<_>>()
        .join(";")
}
