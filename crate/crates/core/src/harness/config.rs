//! Experiment configuration: a flat set of `key = value` lines.
//!
//! ```text
//! # comments start with '#'
//! pipeline = bv-scan
//! function = mobius          # mobius | liouville | unit | custom:<path>
//! X = 10000
//! Q = 30
//! epsilon = 0.5
//! phase_degree = 1           # 0 scores by discrepancy alone
//! seed = 7
//! ```
//!
//! List values are comma separated (`k = 1,2,3`, `X_grid = 1e4,1e5`).
//! Integers accept scientific notation when exact (`1e6`).

use crate::arithfn::FunctionKind;
use crate::error::{Error, Result};
use crate::gowers::Strategy;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Sieve,
    Gowers,
    BvScan,
    RamareCheck,
    Type2,
    Equidist,
    LcmStats,
    Decay,
    Accept,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Sieve => "sieve",
            Pipeline::Gowers => "gowers",
            Pipeline::BvScan => "bv-scan",
            Pipeline::RamareCheck => "ramare-check",
            Pipeline::Type2 => "type2",
            Pipeline::Equidist => "equidist",
            Pipeline::LcmStats => "lcm-stats",
            Pipeline::Decay => "decay",
            Pipeline::Accept => "accept",
        }
    }
}

impl FromStr for Pipeline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sieve" => Pipeline::Sieve,
            "gowers" => Pipeline::Gowers,
            "bv-scan" => Pipeline::BvScan,
            "ramare-check" => Pipeline::RamareCheck,
            "type2" => Pipeline::Type2,
            "equidist" => Pipeline::Equidist,
            "lcm-stats" => Pipeline::LcmStats,
            "decay" => Pipeline::Decay,
            "accept" => Pipeline::Accept,
            other => return Err(Error::Config(format!("unknown pipeline `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSource {
    Builtin(FunctionKind),
    Custom(PathBuf),
}

impl FromStr for FunctionSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("custom:") {
            return Ok(FunctionSource::Custom(PathBuf::from(path)));
        }
        match s.parse::<FunctionKind>() {
            Ok(FunctionKind::Custom) | Err(_) => Err(Error::Config(format!(
                "unknown function `{s}` (mobius, liouville, unit or custom:<file>)"
            ))),
            Ok(k) => Ok(FunctionSource::Builtin(k)),
        }
    }
}

impl std::fmt::Display for FunctionSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionSource::Builtin(k) => write!(f, "{}", k.name()),
            FunctionSource::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

/// Every knob any pipeline reads. Unused fields are ignored by the others.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    pub function: FunctionSource,
    pub x: u64,
    pub q_base: u64,
    pub k_grid: Vec<u32>,
    pub modulus: u64,
    pub residue: Option<u64>,
    pub all_residues: bool,
    pub strategy: Strategy,
    pub epsilon: f64,
    pub phase_degree: usize,
    pub restarts: usize,
    pub seed: u64,
    pub full_range: bool,
    pub window: Option<(f64, f64)>,
    pub fspec: Option<PathBuf>,
    pub fspec_count: usize,
    pub big_k: u64,
    pub big_l: u64,
    pub delta: f64,
    pub delta_exponent: f64,
    pub alphas: Vec<f64>,
    pub n: u64,
    pub r: u64,
    pub m0_grid: Vec<u32>,
    pub x_grid: Vec<u64>,
    pub theta: f64,
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub timings: bool,
    /// The key=value pairs the config was built from, for the manifest.
    pub snapshot: BTreeMap<String, String>,
}

const KEYS: &[&str] = &[
    "pipeline", "function", "X", "Q", "k", "q", "a", "all_residues", "strategy", "epsilon",
    "phase_degree", "restarts", "seed", "full_range", "window", "fspec", "fspec_count", "K", "L",
    "delta", "delta_exponent", "alphas", "N", "R", "m0_grid", "X_grid", "theta",
    "threads", "cache_dir", "out_dir", "timings",
];

/// Parses `key = value` lines into a map.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Config(format!("line {}: unknown key `{k}`", i + 1)));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn parse_u64(key: &str, s: &str) -> Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{s}` is not an integer")))?;
    if f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 {
        Ok(f as u64)
    } else {
        Err(Error::Config(format!("{key}: `{s}` is not a nonnegative integer")))
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| Error::Config(format!("{key}: `{s}` is not a number")))
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: `{s}` is not a boolean"))),
    }
}

fn list<T>(key: &str, s: &str, f: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| f(key, t))
        .collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_map(parse_pairs(&text)?)
    }

    pub fn from_map(map: BTreeMap<String, String>) -> Result<Self> {
        for k in map.keys() {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let u = |k: &str, d: u64| get(k).map_or(Ok(d), |s| parse_u64(k, s));
        let f = |k: &str, d: f64| get(k).map_or(Ok(d), |s| parse_f64(k, s));
        let b = |k: &str, d: bool| get(k).map_or(Ok(d), |s| parse_bool(k, s));

        let pipeline: Pipeline = get("pipeline")
            .ok_or_else(|| Error::Config("missing key `pipeline`".into()))?
            .parse()?;
        let window = match get("window") {
            None => None,
            Some(s) => {
                let v = list("window", s, parse_f64)?;
                if v.len() != 2 {
                    return Err(Error::Config("window: expected `Y,Z`".into()));
                }
                Some((v[0], v[1]))
            }
        };
        let cfg = ExperimentConfig {
            pipeline,
            function: get("function").unwrap_or("mobius").parse()?,
            x: u("X", 10_000)?,
            q_base: u("Q", 10)?,
            k_grid: get("k").map_or(Ok(vec![2]), |s| {
                list("k", s, |k, t| parse_u64(k, t).map(|v| v as u32))
            })?,
            modulus: u("q", 1)?,
            residue: get("a").map(|s| parse_u64("a", s)).transpose()?,
            all_residues: b("all_residues", false)?,
            strategy: get("strategy").unwrap_or("auto").parse()?,
            epsilon: f("epsilon", 0.5)?,
            phase_degree: u("phase_degree", 0)? as usize,
            restarts: u("restarts", 4)? as usize,
            seed: u("seed", 0)?,
            full_range: b("full_range", false)?,
            window,
            fspec: get("fspec").map(PathBuf::from),
            fspec_count: u("fspec_count", 4)? as usize,
            big_k: u("K", 10)?,
            big_l: u("L", 200)?,
            delta: f("delta", 0.1)?,
            delta_exponent: f("delta_exponent", 3.0)?,
            alphas: get("alphas").map_or(Ok(Vec::new()), |s| list("alphas", s, parse_f64))?,
            n: u("N", 10_000)?,
            r: u("R", 0)?,
            m0_grid: get("m0_grid").map_or(Ok(vec![1, 2, 4, 8]), |s| {
                list("m0_grid", s, |k, t| parse_u64(k, t).map(|v| v as u32))
            })?,
            x_grid: get("X_grid").map_or(Ok(Vec::new()), |s| list("X_grid", s, parse_u64))?,
            theta: f("theta", 0.4)?,
            threads: u("threads", 0)? as usize,
            cache_dir: get("cache_dir").map(PathBuf::from),
            out_dir: PathBuf::from(get("out_dir").unwrap_or("out")),
            timings: b("timings", true)?,
            snapshot: map.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Hypothesis and sanity checks for the selected pipeline.
    pub fn validate(&self) -> Result<()> {
        use crate::numeric::gcd;
        if self.k_grid.iter().any(|&k| k == 0 || k > crate::gowers::MAX_DEGREE) {
            let bad = *self.k_grid.iter().find(|&&k| k == 0 || k > crate::gowers::MAX_DEGREE).unwrap();
            return Err(Error::Degree(bad));
        }
        if self.x == 0 {
            return Err(Error::Config("X must be positive".into()));
        }
        match self.pipeline {
            Pipeline::Gowers => {
                if self.modulus == 0 {
                    return Err(Error::Config("q must be positive".into()));
                }
                if let Some(a) = self.residue {
                    if a >= self.modulus || gcd(a, self.modulus) != 1 {
                        return Err(Error::Hypothesis {
                            constraint: "gcd(a, q) = 1",
                            context: format!("a = {a}, q = {}", self.modulus),
                        });
                    }
                }
            }
            Pipeline::BvScan => crate::progressions::check_q_range(self.q_base, self.x)?,
            Pipeline::RamareCheck => {
                let (y, z) = self.window.unwrap_or((10.0, 100.0));
                crate::ramare::RamareWindow::new(y, z)?;
            }
            Pipeline::Type2 => {
                crate::bilinear::TypeIIConfig::new(self.big_k, self.big_l, self.q_base, self.delta)?;
            }
            Pipeline::Equidist => {
                if self.alphas.is_empty() {
                    return Err(Error::Config("equidist needs `alphas`".into()));
                }
                if !(self.delta > 0.0 && self.delta < 0.5) {
                    return Err(Error::Config("delta must lie in (0, 1/2)".into()));
                }
            }
            Pipeline::LcmStats => {
                let r = if self.r == 0 { self.q_base * self.q_base } else { self.r };
                if r < self.q_base || r as u128 > 4 * (self.q_base as u128).pow(2) {
                    return Err(Error::Hypothesis {
                        constraint: "Q ≤ R ≤ 4Q²",
                        context: format!("Q = {}, R = {r}", self.q_base),
                    });
                }
            }
            Pipeline::Decay => {
                if self.x_grid.is_empty() {
                    return Err(Error::Config("decay needs `X_grid`".into()));
                }
                if self.x_grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("X_grid must be increasing".into()));
                }
            }
            Pipeline::Sieve | Pipeline::Accept => {}
        }
        Ok(())
    }

    /// Config with defaults for `pipeline` and nothing else set.
    pub fn defaults(pipeline: Pipeline) -> Result<Self> {
        let mut m = BTreeMap::new();
        m.insert("pipeline".to_string(), pipeline.name().to_string());
        if pipeline == Pipeline::Equidist {
            m.insert("alphas".into(), "0.6180339887".into());
        }
        if pipeline == Pipeline::Decay {
            m.insert("X_grid".into(), "10000,100000".into());
        }
        Self::from_map(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text() {
        let m = parse_pairs("pipeline = bv-scan\n# c\nX = 1e4\nQ = 30 # dyadic\nk = 1, 2\n").unwrap();
        let c = ExperimentConfig::from_map(m).unwrap();
        assert_eq!(c.pipeline, Pipeline::BvScan);
        assert_eq!(c.x, 10_000);
        assert_eq!(c.k_grid, vec![1, 2]);
        assert_eq!(c.function, FunctionSource::Builtin(FunctionKind::Mobius));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_pairs("nonsense").is_err());
        assert!(parse_pairs("colour = red").is_err());
        let mut m = BTreeMap::new();
        m.insert("pipeline".to_string(), "bv-scan".to_string());
        m.insert("Q".to_string(), "40".to_string());
        let e = ExperimentConfig::from_map(m).unwrap_err();
        assert!(e.to_string().contains("10Q² ≤ X"), "{e}");
        assert!(parse_u64("X", "1.5").is_err());
        assert!("custom".parse::<FunctionSource>().is_err());
        assert_eq!(
            "custom:/tmp/f.txt".parse::<FunctionSource>().unwrap(),
            FunctionSource::Custom(PathBuf::from("/tmp/f.txt"))
        );
    }
}
