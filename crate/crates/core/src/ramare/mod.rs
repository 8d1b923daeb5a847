//! The decomposition `f = f′ * g` with `f′` completely multiplicative, and
//! the Ramaré-weight pipeline over a window of primes `[Y, Z)`.

mod multspec;
mod partition;
mod window;

pub use multspec::MultSpec;
pub use partition::{cauchy_schwarz_gap, sigma_partition, CsGap, DyadicSlice, SigmaPartition};
pub use window::{
    coprime_window_count, mertens_prediction, musq_window, ramare_identity_check, ramare_weight,
    window_primes, IdentityCheck, RamareWindow,
};

use crate::arithfn::{sieve_spf, ArithTable};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use num_complex::Complex64;

/// Prime-power values of the complement `g` in `f = f′ * g`.
#[derive(Clone, Debug)]
pub struct GSpec {
    f: MultSpec,
    k_max: u32,
}

impl GSpec {
    /// Solves `g(p^k) = f(p^k) − Σ_{j=1}^{k} f(p)^j g(p^{k−j})` for
    /// `k ≤ k_max`. Returns `g(p^0), …, g(p^{k_max})`.
    pub fn prime_column(&self, p: u64) -> Vec<Complex64> {
        let fp = self.f.value(p, 1);
        let mut g = vec![Complex64::new(1.0, 0.0)];
        for k in 1..=self.k_max {
            let mut s = self.f.value(p, k);
            let mut pw = Complex64::new(1.0, 0.0);
            for j in 1..=k {
                pw *= fp;
                s -= pw * g[(k - j) as usize];
            }
            g.push(s);
        }
        g
    }

    /// `g(p^k)`. Panics if `k > k_max`.
    pub fn value(&self, p: u64, k: u32) -> Complex64 {
        assert!(k <= self.k_max, "exponent {k} above k_max = {}", self.k_max);
        self.prime_column(p)[k as usize]
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }
}

/// `(f′, g)` with `f′(p^k) = f(p)^k` and `f = f′ * g` on prime powers up to
/// exponent `k_max`.
pub fn decompose(f: &MultSpec, k_max: u32) -> (MultSpec, GSpec) {
    let base = f.clone();
    let fprime = MultSpec::completely(&format!("{}-prime", f.name()), move |p| base.value(p, 1));
    (
        fprime,
        GSpec {
            f: f.clone(),
            k_max,
        },
    )
}

/// Exponent bound sufficient for every `n ≤ x`.
pub fn exponent_bound(x: u64) -> u32 {
    64 - x.max(1).leading_zeros()
}

/// `g(n)` for `n ≤ X`, multiplicatively from the prime columns.
pub fn g_table(g: &GSpec, x: u64) -> Result<Vec<Complex64>> {
    if exponent_bound(x) > g.k_max {
        return Err(Error::Domain(format!(
            "k_max = {} too small for X = {x}",
            g.k_max
        )));
    }
    let spf = sieve_spf(x.max(2))?;
    let n = x as usize;
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    if n >= 1 {
        v[1] = Complex64::new(1.0, 0.0);
    }
    let mut cols: std::collections::HashMap<u64, Vec<Complex64>> = Default::default();
    for m in 2..=n {
        let p = spf.spf(m as u64) as usize;
        let mut rest = m / p;
        let mut e = 1;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if v[rest].norm_sqr() == 0.0 {
            continue;
        }
        let col = cols.entry(p as u64).or_insert_with(|| g.prime_column(p as u64));
        v[m] = col[e] * v[rest];
    }
    Ok(v)
}

/// `max_{n ≤ X} |f(n) − Σ_{ℓm=n} g(ℓ) f′(m)|`.
pub fn verify_convolution(f: &ArithTable, fprime: &ArithTable, g: &GSpec, x: u64) -> Result<f64> {
    if f.upper_bound() < x || fprime.upper_bound() < x {
        return Err(Error::Coverage(format!("tables must cover [1, {x}]")));
    }
    let gv = g_table(g, x)?;
    let n = x as usize;
    let mut conv = vec![Complex64::new(0.0, 0.0); n + 1];
    for l in 1..=n {
        let gl = gv[l];
        if gl.norm_sqr() == 0.0 {
            continue;
        }
        for m in 1..=n / l {
            conv[l * m] += gl * fprime.get(m as u64);
        }
    }
    Ok((1..=n)
        .map(|i| (f.get(i as u64) - conv[i]).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GPartialSums {
    /// `Σ_{N ≤ n ≤ N_cap} |g(n)|/n`.
    pub tail_weighted: f64,
    /// `Σ_{n ≤ N} |g(n)|`.
    pub head: f64,
    pub n: u64,
    pub n_cap: u64,
}

/// Partial sums of `|g|` over squarefull `n` (the support of `g`, since
/// `g(p) = 0`), generated recursively from prime powers with exponent ≥ 2.
pub fn g_partial_sums(g: &GSpec, n: u64, n_cap: Option<u64>) -> Result<GPartialSums> {
    if n < 1 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let n_cap = n_cap.unwrap_or_else(|| n.saturating_mul(n)).max(n);
    let limit = n_cap;
    let root = (limit as f64).sqrt() as u64 + 1;
    let spf = sieve_spf(root.max(2))?;
    let primes: Vec<u64> = spf
        .primes()
        .iter()
        .map(|&p| p as u64)
        .filter(|&p| (p as u128) * (p as u128) <= limit as u128)
        .collect();
    let cols: Vec<Vec<Complex64>> = primes
        .iter()
        .map(|&p| {
            let top = (limit as f64).log(p as f64).floor() as u32 + 1;
            GSpec {
                f: g.f.clone(),
                k_max: top,
            }
            .prime_column(p)
        })
        .collect();
    let mut head = CompensatedSum::new();
    let mut tail = CompensatedSum::new();
    // iterative DFS over (next prime index, n, |g(n)|)
    let mut stack = vec![(0usize, 1u64, 1.0f64)];
    while let Some((idx, m, gm)) = stack.pop() {
        if m <= n {
            head.add_real(gm);
        }
        if m >= n {
            tail.add_real(gm / m as f64);
        }
        for i in idx..primes.len() {
            let p = primes[i];
            let p2 = (p as u128) * (p as u128);
            if (m as u128) * p2 > limit as u128 {
                break;
            }
            let mut pk = p2 as u64;
            let mut k = 2usize;
            loop {
                let next = m * pk;
                let gv = cols[i].get(k).copied().unwrap_or_default().norm();
                if gv != 0.0 {
                    stack.push((i + 1, next, gm * gv));
                }
                match (next as u128) * (p as u128) <= limit as u128 {
                    true => {
                        pk *= p;
                        k += 1;
                    }
                    false => break,
                }
            }
        }
    }
    Ok(GPartialSums {
        tail_weighted: tail.value().re,
        head: head.value().re,
        n,
        n_cap,
    })
}
