//! Multiplicative functions given by their values on prime powers.

use crate::arithfn::FunctionKind;
use crate::error::{Error, Result};
use crate::numeric::{derive_seed, mix64};
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

type Rule = Arc<dyn Fn(u64, u32) -> Complex64 + Send + Sync>;

/// A multiplicative function through `(p, k) ↦ f(p^k)`, `k ≥ 1`.
///
/// For completely multiplicative specs the rule is consulted only at `k = 1`.
#[derive(Clone)]
pub struct MultSpec {
    name: String,
    rule: Rule,
    completely_multiplicative: bool,
}

impl fmt::Debug for MultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultSpec")
            .field("name", &self.name)
            .field("completely_multiplicative", &self.completely_multiplicative)
            .finish()
    }
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl MultSpec {
    pub fn from_fn<F>(name: &str, completely_multiplicative: bool, rule: F) -> Self
    where
        F: Fn(u64, u32) -> Complex64 + Send + Sync + 'static,
    {
        MultSpec {
            name: name.to_string(),
            rule: Arc::new(rule),
            completely_multiplicative,
        }
    }

    /// Completely multiplicative with `f(p)` given.
    pub fn completely<F>(name: &str, at_prime: F) -> Self
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        Self::from_fn(name, true, move |p, _| at_prime(p))
    }

    pub fn mobius() -> Self {
        Self::from_fn("mobius", false, |_, k| if k == 1 { -ONE } else { ZERO })
    }

    pub fn liouville() -> Self {
        Self::completely("liouville", |_| -ONE)
    }

    pub fn unit() -> Self {
        Self::completely("unit", |_| ONE)
    }

    pub fn squarefree_indicator() -> Self {
        Self::from_fn("squarefree", false, |_, k| if k == 1 { ONE } else { ZERO })
    }

    /// Values drawn independently and uniformly from the closed unit disc,
    /// as a deterministic function of `(seed, p, k)`.
    pub fn random_unit_disc(seed: u64) -> Self {
        Self::from_fn(&format!("random-disc-{seed}"), false, move |p, k| {
            let h = derive_seed(seed, mix64(p) ^ k as u64);
            let u1 = (h >> 11) as f64 / (1u64 << 53) as f64;
            let u2 = (mix64(h) >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::from_polar(u1.sqrt(), std::f64::consts::TAU * u2)
        })
    }

    pub fn builtin(kind: FunctionKind) -> Result<Self> {
        match kind {
            FunctionKind::Mobius => Ok(Self::mobius()),
            FunctionKind::Liouville => Ok(Self::liouville()),
            FunctionKind::Unit => Ok(Self::unit()),
            FunctionKind::Custom => Err(Error::Config("custom specs are read from a file".into())),
        }
    }

    /// Reads a spec file. Blank lines and `#` comments are skipped. Lines are
    ///
    /// ```text
    /// name = my-function
    /// default = mobius            # mobius | liouville | unit | squarefree | zero
    /// completely_multiplicative = false
    /// 3 1 0.5 0.25                # p k re [im]
    /// ```
    ///
    /// Prime powers not listed take the default's value.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = "custom".to_string();
        let mut default = Self::from_fn("zero", false, |_, _| ZERO);
        let mut cm = false;
        let mut table: HashMap<(u64, u32), Complex64> = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Config(format!("line {}: {msg}", lineno + 1));
            if let Some((key, value)) = line.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "name" => name = value.to_string(),
                    "completely_multiplicative" => {
                        cm = value.parse().map_err(|_| bad("expected true or false"))?
                    }
                    "default" => {
                        default = match value {
                            "mobius" | "mu" => Self::mobius(),
                            "liouville" | "lambda" => Self::liouville(),
                            "unit" => Self::unit(),
                            "squarefree" => Self::squarefree_indicator(),
                            "zero" => Self::from_fn("zero", false, |_, _| ZERO),
                            other => return Err(bad(&format!("unknown default `{other}`"))),
                        }
                    }
                    other => return Err(bad(&format!("unknown key `{other}`"))),
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 && fields.len() != 4 {
                return Err(bad("expected `p k re [im]`"));
            }
            let p: u64 = fields[0].parse().map_err(|_| bad("bad prime"))?;
            let k: u32 = fields[1].parse().map_err(|_| bad("bad exponent"))?;
            let re: f64 = fields[2].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = match fields.get(3) {
                Some(s) => s.parse().map_err(|_| bad("bad imaginary part"))?,
                None => 0.0,
            };
            if k == 0 {
                return Err(bad("exponent must be at least 1"));
            }
            let v = Complex64::new(re, im);
            if !(v.norm() <= 1.0 + 1e-12) {
                return Err(Error::Domain(format!("value at {p}^{k} has modulus {} > 1", v.norm())));
            }
            table.insert((p, k), v);
        }
        Ok(Self::from_fn(&name, cm, move |p, k| {
            table.get(&(p, k)).copied().unwrap_or_else(|| default.value(p, k))
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_completely_multiplicative(&self) -> bool {
        self.completely_multiplicative
    }

    /// `f(p^k)`; `k = 0` gives 1.
    pub fn value(&self, p: u64, k: u32) -> Complex64 {
        if k == 0 {
            return ONE;
        }
        if self.completely_multiplicative {
            (self.rule)(p, 1).powu(k)
        } else {
            (self.rule)(p, k)
        }
    }
}
