//! Tabulation of arithmetic functions on `[1, X]`.
//!
//! Möbius and Liouville tables are stored as `i8`; tables built from an
//! arbitrary [`MultSpec`] hold complex values.

mod cache;
mod sieve;

pub use cache::{load_or_build, read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use sieve::{sieve_spf, sieve_spf_with_limit, SpfTable, DEFAULT_MAX_ENTRIES};

use crate::error::{Error, Result};
use crate::ramare::MultSpec;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

/// Which arithmetic function a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    Mobius,
    Liouville,
    Unit,
    Custom,
}

impl FunctionKind {
    pub fn tag(self) -> u8 {
        match self {
            FunctionKind::Mobius => 0,
            FunctionKind::Liouville => 1,
            FunctionKind::Unit => 2,
            FunctionKind::Custom => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => FunctionKind::Mobius,
            1 => FunctionKind::Liouville,
            2 => FunctionKind::Unit,
            3 => FunctionKind::Custom,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Mobius => "mobius",
            FunctionKind::Liouville => "liouville",
            FunctionKind::Unit => "unit",
            FunctionKind::Custom => "custom",
        }
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mobius" | "mu" => Ok(FunctionKind::Mobius),
            "liouville" | "lambda" => Ok(FunctionKind::Liouville),
            "unit" | "one" => Ok(FunctionKind::Unit),
            "custom" => Ok(FunctionKind::Custom),
            other => Err(Error::Config(format!("unknown function kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Values {
    Small(Vec<i8>),
    Complex(Vec<Complex64>),
}

/// Values of an arithmetic function on `[0, X]`. Index 0 always holds 0.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct ArithTable {
    kind: FunctionKind,
    upper_bound: u64,
    values: Values,
}

impl ArithTable {
    pub(crate) fn from_parts(kind: FunctionKind, upper_bound: u64, values: Values) -> Self {
        let len = match &values {
            Values::Small(v) => v.len(),
            Values::Complex(v) => v.len(),
        };
        assert_eq!(len as u64, upper_bound + 1);
        ArithTable {
            kind,
            upper_bound,
            values,
        }
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn upper_bound(&self) -> u64 {
        self.upper_bound
    }

    #[inline]
    pub fn get(&self, n: u64) -> Complex64 {
        match &self.values {
            Values::Small(v) => Complex64::new(v[n as usize] as f64, 0.0),
            Values::Complex(v) => v[n as usize],
        }
    }

    /// The `i8` storage when every value lies in `{-1, 0, 1}`.
    pub fn small_values(&self) -> Option<&[i8]> {
        match &self.values {
            Values::Small(v) => Some(v),
            Values::Complex(_) => None,
        }
    }

    pub fn complex_values(&self) -> Option<&[Complex64]> {
        match &self.values {
            Values::Small(_) => None,
            Values::Complex(v) => Some(v),
        }
    }

    pub(crate) fn values(&self) -> &Values {
        &self.values
    }

    /// Values on `[lo, hi]` as complex numbers.
    pub fn slice_complex(&self, lo: u64, hi: u64) -> Vec<Complex64> {
        (lo..=hi).map(|n| self.get(n)).collect()
    }
}

pub fn sieve_mobius(x: u64) -> Result<ArithTable> {
    sieve_mobius_with_limit(x, DEFAULT_MAX_ENTRIES)
}

pub fn sieve_mobius_with_limit(x: u64, limit: u64) -> Result<ArithTable> {
    if x < 1 {
        return Err(Error::Domain("table bound must be at least 1".into()));
    }
    let v = sieve::mobius_values(x, limit)?;
    Ok(ArithTable::from_parts(FunctionKind::Mobius, x, Values::Small(v)))
}

pub fn sieve_liouville(x: u64) -> Result<ArithTable> {
    sieve_liouville_with_limit(x, DEFAULT_MAX_ENTRIES)
}

pub fn sieve_liouville_with_limit(x: u64, limit: u64) -> Result<ArithTable> {
    if x < 1 {
        return Err(Error::Domain("table bound must be at least 1".into()));
    }
    let v = sieve::liouville_values(x, limit)?;
    Ok(ArithTable::from_parts(
        FunctionKind::Liouville,
        x,
        Values::Small(v),
    ))
}

pub fn unit_table(x: u64) -> Result<ArithTable> {
    if x < 1 {
        return Err(Error::Domain("table bound must be at least 1".into()));
    }
    if x > DEFAULT_MAX_ENTRIES {
        return Err(Error::Capacity {
            requested: x,
            limit: DEFAULT_MAX_ENTRIES,
        });
    }
    let mut v = vec![1i8; x as usize + 1];
    v[0] = 0;
    Ok(ArithTable::from_parts(FunctionKind::Unit, x, Values::Small(v)))
}

/// Builds the table of a built-in kind. `Custom` needs a [`MultSpec`]; use
/// [`table_from_multspec`] for it.
pub fn build_table(kind: FunctionKind, x: u64) -> Result<ArithTable> {
    match kind {
        FunctionKind::Mobius => sieve_mobius(x),
        FunctionKind::Liouville => sieve_liouville(x),
        FunctionKind::Unit => unit_table(x),
        FunctionKind::Custom => Err(Error::Config(
            "custom tables are built from a multiplicative spec".into(),
        )),
    }
}

/// Tabulates `n ↦ ∏ spec(p_i, e_i)` over the factorization of `n`.
pub fn table_from_multspec(spec: &MultSpec, x: u64) -> Result<ArithTable> {
    const TOL: f64 = 1e-12;
    let spf = sieve_spf(x)?;
    let n = x as usize;
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    if n >= 1 {
        v[1] = Complex64::new(1.0, 0.0);
    }
    for m in 2..=n {
        let p = spf.spf(m as u64) as usize;
        // Strip the full power of p: m = p^e · rest with p ∤ rest.
        let mut rest = m / p;
        let mut e = 1u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        let pe = spec.value(p as u64, e);
        if pe.norm() > 1.0 + TOL {
            return Err(Error::Domain(format!(
                "multiplicative spec value at {p}^{e} has modulus {} > 1",
                pe.norm()
            )));
        }
        v[m] = pe * v[rest];
    }
    Ok(ArithTable::from_parts(
        FunctionKind::Custom,
        x,
        Values::Complex(v),
    ))
}
