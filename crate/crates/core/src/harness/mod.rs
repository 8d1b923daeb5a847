//! Experiment runner: configuration, pipelines, CSV output and manifests.
//!
//! Every pipeline writes its CSVs into `out_dir` together with
//! `manifest.txt`, a `key = value` record of the configuration, per-stage
//! wall-clock times, output digests (SHA-256) and assertion outcomes.
//! CSV contents never depend on scheduling: parallel work is reduced in a
//! fixed order and per-task seeds are derived from `(seed, task id)`.

mod accept;
mod config;
mod decay;
mod pipelines;

pub use accept::run_accept;
pub use config::{parse_pairs, parse_u64, ExperimentConfig, FunctionSource, Pipeline};
pub use decay::{decay_table, envelope, DecayRow};

use crate::arithfn::{load_or_build, table_from_multspec, ArithTable};
use crate::error::{Error, Result};
use crate::ramare::MultSpec;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed 15-significant-digit rendering used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000000e0".to_string();
    }
    format!("{x:.14e}")
}

/// Rows of a CSV file, rendered as they are added.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Csv::default();
        c.text.push_str(&header.join(","));
        c.text.push('\n');
        c
    }

    pub fn with_header(header: Vec<String>) -> Self {
        let mut c = Csv::default();
        c.text.push_str(&header.join(","));
        c.text.push('\n');
        c
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct RunManifest {
    pub pipeline: String,
    pub version: String,
    pub seed: u64,
    pub threads: usize,
    pub config: BTreeMap<String, String>,
    pub stages: Vec<(String, f64)>,
    /// `(file name, sha256 hex)` in write order.
    pub outputs: Vec<(String, String)>,
    pub assertions: Vec<Assertion>,
}

impl RunManifest {
    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn digest(&self, file: &str) -> Option<&str> {
        self.outputs.iter().find(|(f, _)| f == file).map(|(_, d)| d.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tool = gpat");
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "pipeline = {}", self.pipeline);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "threads = {}", self.threads);
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k} = {v}");
        }
        for (name, secs) in &self.stages {
            let _ = writeln!(s, "stage.{name}.seconds = {secs:.6}");
        }
        for (file, digest) in &self.outputs {
            let _ = writeln!(s, "output.{file}.sha256 = {digest}");
        }
        for a in &self.assertions {
            let verdict = if a.pass { "pass" } else { "fail" };
            let _ = writeln!(s, "assert.{} = {verdict} ({})", a.name, a.detail);
        }
        s
    }
}

/// State of one run: output directory and the manifest under construction.
pub struct Run {
    pub cfg: ExperimentConfig,
    pub manifest: RunManifest,
    out_dir: PathBuf,
}

impl Run {
    fn new(cfg: ExperimentConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.out_dir)?;
        let manifest = RunManifest {
            pipeline: cfg.pipeline.name().to_string(),
            version: TOOL_VERSION.to_string(),
            seed: cfg.seed,
            threads: cfg.threads,
            config: cfg.snapshot.clone(),
            ..Default::default()
        };
        Ok(Run {
            out_dir: cfg.out_dir.clone(),
            cfg,
            manifest,
        })
    }

    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let out = f(self)?;
        self.manifest.stages.push((name.to_string(), t0.elapsed().as_secs_f64()));
        Ok(out)
    }

    pub fn emit(&mut self, file: &str, csv: &Csv) -> Result<()> {
        let path = self.out_dir.join(file);
        std::fs::write(&path, csv.as_str())?;
        let digest = hex::encode(Sha256::digest(csv.as_str().as_bytes()));
        self.manifest.outputs.push((file.to_string(), digest));
        Ok(())
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.manifest.assertions.push(Assertion {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }
}

/// The arithmetic function named by the config, tabulated to `x`.
pub fn load_table(cfg: &ExperimentConfig, x: u64) -> Result<ArithTable> {
    match &cfg.function {
        FunctionSource::Builtin(kind) => load_or_build(*kind, x, cfg.cache_dir.as_deref()),
        FunctionSource::Custom(path) => table_from_multspec(&MultSpec::from_file(path)?, x),
    }
}

/// Runs the configured pipeline on a pool of `cfg.threads` workers (all
/// available cores when 0), writes outputs and `manifest.txt`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut run = Run::new(cfg.clone())?;
    pool.install(|| pipelines::dispatch(&mut run))?;
    let text = run.manifest.to_text();
    std::fs::write(run.out_dir().join("manifest.txt"), text)?;
    Ok(run.manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering() {
        assert_eq!(fmt_f64(1.0), "1.00000000000000e0");
        assert_eq!(fmt_f64(-0.000_123_456_789_012_345_67), "-1.23456789012346e-4");
        assert_eq!(fmt_f64(0.0), fmt_f64(-0.0));
    }

    #[test]
    fn minimal_run_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = BTreeMap::new();
        m.insert("pipeline".to_string(), "gowers".to_string());
        m.insert("function".to_string(), "unit".to_string());
        m.insert("X".to_string(), "1000".to_string());
        m.insert("q".to_string(), "3".to_string());
        m.insert("all_residues".to_string(), "true".to_string());
        m.insert("k".to_string(), "1,2,3".to_string());
        m.insert("timings".to_string(), "false".to_string());
        m.insert("out_dir".to_string(), dir.path().display().to_string());
        let cfg = ExperimentConfig::from_map(m).unwrap();
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.outputs, b.outputs);
        let text = std::fs::read_to_string(dir.path().join("gowers.csv")).unwrap();
        assert!(text.starts_with("q,a,k,Y,norm,strategy,seconds\n"));
        assert_eq!(text.lines().count(), 7);
        assert!(dir.path().join("manifest.txt").exists());
    }
}
