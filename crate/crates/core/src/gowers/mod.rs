//! Gowers `U^k` norms of finite sequences on an interval `[0, Y]`.
//!
//! The sequence is embedded in `Z_N` with `N = 2^k (Y + 1)`, the group norm
//! is taken there, and the result is divided by the group norm of the
//! indicator of `[0, Y]` embedded the same way. Because `N > 2Y`, no
//! parallelepiped wraps around, so the ratio equals
//!
//! ```text
//! Σ_{integer configurations in [0,Y]} Π_ω C^{|ω|} f(n + ω·h)
//! ----------------------------------------------------------
//!        #{integer configurations in [0,Y]}
//! ```
//!
//! raised to the power `1/2^k`, independently of `N`.

mod fft;
mod naive;

use crate::arithfn::ArithTable;
use crate::error::{Error, Result};
use crate::numeric::{gcd, pairwise_sum, CompensatedSum};
use fft::FftCache;
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

pub const MAX_DEGREE: u32 = 6;

/// Finite complex sequence indexed by `0..=Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSeq {
    values: Vec<Complex64>,
    bounded: bool,
}

impl ComplexSeq {
    /// Rejects empty input and non-finite values. The boundedness flag is set
    /// when every value has modulus at most 1.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("sequence must be nonempty".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("sequence has a non-finite value".into()));
        }
        let bounded = values.iter().all(|z| z.norm() <= 1.0 + 1e-12);
        Ok(ComplexSeq { values, bounded })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_values_unchecked(values: Vec<Complex64>, bounded: bool) -> Self {
        ComplexSeq { values, bounded }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Last index `Y`.
    pub fn y(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Auto,
    Naive,
    RecursiveFft,
    U1Mean,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::Naive => "naive",
            Strategy::RecursiveFft => "recursive_fft",
            Strategy::U1Mean => "u1_mean",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Strategy::Auto,
            "naive" => Strategy::Naive,
            "recursive_fft" | "recursive" | "fft" => Strategy::RecursiveFft,
            "u1_mean" | "mean" => Strategy::U1Mean,
            other => return Err(Error::Config(format!("unknown strategy `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GowersOptions {
    /// Upper limit on `(Y+1)^{k+1}` for the naive strategy.
    pub naive_budget: f64,
    /// Upper limit on the estimated flop count of the recursive strategy.
    pub recursive_budget: f64,
}

impl Default for GowersOptions {
    fn default() -> Self {
        GowersOptions {
            naive_budget: 1e10,
            recursive_budget: 1e13,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GowersResult {
    pub k: u32,
    pub norm: f64,
    /// `‖f·1_[0,Y]‖_{U^k(Z_N)}^{2^k}`.
    pub raw_numerator: f64,
    /// `‖1_[0,Y]‖_{U^k(Z_N)}^{2^k}`.
    pub normalizer: f64,
    /// Group order `N = 2^k (Y + 1)`.
    pub group_order: u64,
    pub strategy: Strategy,
}

/// Number of integer parallelepipeds of dimension `k` inside `[0, Y]`:
/// `Σ_{h ∈ Z^k} max(0, Y + 1 − |h|_1)`.
pub fn configuration_count(y: u64, k: u32) -> f64 {
    let k = k as u64;
    let binom = |n: u64, r: u64| -> f64 {
        if r > n {
            return 0.0;
        }
        (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    let mut acc = CompensatedSum::new();
    acc.add_real((y + 1) as f64);
    for t in 1..=y {
        let mut c = 0.0;
        for j in 1..=k.min(t) {
            c += 2f64.powi(j as i32) * binom(k, j) * binom(t - 1, j - 1);
        }
        acc.add_real(c * (y + 1 - t) as f64);
    }
    acc.value().re
}

/// `g[n] = f[n+h]·conj(f[n])` on the overlap of `[0,Y]` and `[-h, Y-h]`,
/// zero elsewhere. Same length as `f`.
pub fn multiplicative_derivative(f: &ComplexSeq, h: i64) -> ComplexSeq {
    let len = f.len() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
    for n in 0.max(-h)..len.min(len - h) {
        out[n as usize] = f.values[(n + h) as usize] * f.values[n as usize].conj();
    }
    ComplexSeq {
        values: out,
        bounded: f.bounded,
    }
}

/// Compact derivative for `h ≥ 0`: `g[n] = f[n+h] conj f[n]`, `0 ≤ n < len-h`.
fn derivative_compact(f: &[Complex64], h: usize) -> Vec<Complex64> {
    f[h..].iter().zip(f).map(|(a, b)| a * b.conj()).collect()
}

fn sum_abs_sq(f: &[Complex64]) -> f64 {
    let s: CompensatedSum = f.iter().copied().collect();
    s.value().norm_sqr()
}

/// Unnormalized configuration sum by `S_k(f) = Σ_h S_{k-1}(Δ_h f)`, with
/// the `h ↔ -h` symmetry `S(Δ_{-h} f) = S(Δ_h f)` and the FFT fourth moment
/// as the `k = 2` base.
fn recursive_sum(f: &[Complex64], k: u32, cache: &FftCache, parallel: bool) -> f64 {
    match k {
        1 => sum_abs_sq(f),
        2 => cache.fourth_moment(f),
        _ => {
            let term = |h: usize| {
                let w = if h == 0 { 1.0 } else { 2.0 };
                w * recursive_sum(&derivative_compact(f, h), k - 1, cache, false)
            };
            let terms: Vec<f64> = if parallel {
                (0..f.len()).into_par_iter().map(term).collect()
            } else {
                (0..f.len()).map(term).collect()
            };
            pairwise_sum(&terms)
        }
    }
}

fn validate_degree(k: u32) -> Result<()> {
    if k == 0 || k > MAX_DEGREE {
        return Err(Error::Degree(k));
    }
    Ok(())
}

fn recursive_cost(len: f64, k: u32) -> f64 {
    let m = (2.0 * len).max(2.0);
    match k {
        1 => len,
        _ => len.powi(k as i32 - 2) * m * m.log2().max(1.0) * 5.0,
    }
}

/// Interval-normalized Gowers `U^k` norm of `f` on `[0, Y]`.
pub fn gowers_norm(f: &ComplexSeq, k: u32, strategy: Strategy) -> Result<GowersResult> {
    gowers_norm_with(f, k, strategy, GowersOptions::default())
}

pub fn gowers_norm_with(
    f: &ComplexSeq,
    k: u32,
    strategy: Strategy,
    opts: GowersOptions,
) -> Result<GowersResult> {
    validate_degree(k)?;
    let len = f.len() as f64;
    let y = f.y() as u64;
    let used = match strategy {
        Strategy::Auto if k == 1 => Strategy::U1Mean,
        Strategy::Auto => Strategy::RecursiveFft,
        Strategy::U1Mean if k != 1 => {
            return Err(Error::Domain("u1_mean strategy applies only to k = 1".into()))
        }
        s => s,
    };
    let sum = match used {
        Strategy::Naive => {
            let cost = len.powi(k as i32 + 1);
            if cost > opts.naive_budget {
                return Err(Error::Cost {
                    estimated: cost,
                    budget: opts.naive_budget,
                });
            }
            naive::config_sum(&f.values, k)
        }
        Strategy::RecursiveFft => {
            let cost = recursive_cost(len, k);
            if cost > opts.recursive_budget {
                return Err(Error::Cost {
                    estimated: cost,
                    budget: opts.recursive_budget,
                });
            }
            recursive_sum(&f.values, k, &FftCache::default(), true)
        }
        Strategy::U1Mean => sum_abs_sq(&f.values),
        Strategy::Auto => unreachable!(),
    };
    let count = configuration_count(y, k);
    let group_order = (1u64 << k) * (y + 1);
    let scale = (group_order as f64).powi(k as i32 + 1);
    let raw_numerator = sum.max(0.0) / scale;
    let normalizer = count / scale;
    let norm = (sum.max(0.0) / count).powf(1.0 / (1u64 << k) as f64);
    Ok(GowersResult {
        k,
        norm,
        raw_numerator,
        normalizer,
        group_order,
        strategy: used,
    })
}

/// `m ↦ table[q·m + a]` over the positive `n = q·m + a ≤ X`.
pub fn progression_sequence(table: &ArithTable, q: u64, a: u64, x: u64) -> Result<ComplexSeq> {
    if q == 0 || a >= q {
        return Err(Error::Domain(format!("need 0 <= a < q, got q={q}, a={a}")));
    }
    if gcd(a, q) != 1 {
        return Err(Error::Domain(format!("residue {a} is not reduced modulo {q}")));
    }
    if x > table.upper_bound() {
        return Err(Error::Coverage(format!(
            "X = {x} exceeds table bound {}",
            table.upper_bound()
        )));
    }
    let first = if a == 0 { q } else { a };
    if first > x {
        return Err(Error::Domain(format!("progression {a} mod {q} has no terms up to {x}")));
    }
    let values: Vec<Complex64> = (first..=x).step_by(q as usize).map(|n| table.get(n)).collect();
    ComplexSeq::new(values)
}

/// `‖f(q·+a)‖_{U^k(X/q)}` for the tabulated function `f`.
pub fn gowers_norm_in_progression(
    table: &ArithTable,
    q: u64,
    a: u64,
    x: u64,
    k: u32,
    strategy: Strategy,
) -> Result<GowersResult> {
    validate_degree(k)?;
    if q.saturating_mul(k as u64) > x {
        return Err(Error::Domain(format!("need q·k <= X, got q={q}, k={k}, X={x}")));
    }
    let seq = progression_sequence(table, q, a, x)?;
    gowers_norm(&seq, k, strategy)
}

fn cyclic_derivative(f: &[Complex64], h: usize) -> Vec<Complex64> {
    let n = f.len();
    (0..n).map(|x| f[(x + h) % n] * f[x].conj()).collect()
}

fn cyclic_sum(f: &[Complex64], k: u32, cache: &FftCache) -> f64 {
    match k {
        1 => sum_abs_sq(f),
        2 => cache.fourth_moment_cyclic_padded(f, f.len()),
        _ => {
            let terms: Vec<f64> = (0..f.len())
                .map(|h| cyclic_sum(&cyclic_derivative(f, h), k - 1, cache))
                .collect();
            pairwise_sum(&terms)
        }
    }
}

/// Group norm `‖f‖_{U^k(Z_N)}` with `N = values.len()`, wraparound included.
pub fn cyclic_gowers_norm(values: &[Complex64], k: u32) -> Result<f64> {
    validate_degree(k)?;
    if values.is_empty() {
        return Err(Error::Domain("sequence must be nonempty".into()));
    }
    let n = values.len() as f64;
    let s = cyclic_sum(values, k, &FftCache::default()).max(0.0);
    Ok((s / n.powi(k as i32 + 1)).powf(1.0 / (1u64 << k) as f64))
}

/// Cyclic group norm by enumerating all `N^{k+1}` tuples. Oracle for
/// [`cyclic_gowers_norm`]; only for tiny `N`.
pub fn cyclic_gowers_norm_naive(values: &[Complex64], k: u32) -> Result<f64> {
    validate_degree(k)?;
    let n = values.len() as f64;
    let s = naive::cyclic_config_sum(values, k).max(0.0);
    Ok((s / n.powi(k as i32 + 1)).powf(1.0 / (1u64 << k) as f64))
}

/// Interval norm computed by embedding into `Z_N` for an explicit `N` and
/// dividing by the embedded indicator. Agrees with [`gowers_norm`] for any
/// `N > 2Y`.
pub fn interval_norm_in_group(f: &ComplexSeq, k: u32, group_order: usize) -> Result<f64> {
    validate_degree(k)?;
    if group_order < f.len() {
        return Err(Error::Domain("group order smaller than the sequence".into()));
    }
    let mut padded = vec![Complex64::new(0.0, 0.0); group_order];
    padded[..f.len()].copy_from_slice(&f.values);
    let mut ind = vec![Complex64::new(0.0, 0.0); group_order];
    ind[..f.len()].fill(Complex64::new(1.0, 0.0));
    let cache = FftCache::default();
    let num = cyclic_sum(&padded, k, &cache).max(0.0);
    let den = cyclic_sum(&ind, k, &cache);
    Ok((num / den).powf(1.0 / (1u64 << k) as f64))
}
