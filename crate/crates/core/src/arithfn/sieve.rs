//! Linear (smallest-prime-factor) sieves.
//!
//! Every composite `n ≤ X` is written exactly once as `i·p` with `p` the least
//! prime of `n`, so each sieve runs in `O(X)` time.

use crate::error::{Error, Result};

/// Largest table the sieves will allocate unless a caller passes its own limit.
pub const DEFAULT_MAX_ENTRIES: u64 = 1_000_000_000;

fn check_capacity(x: u64, limit: u64) -> Result<()> {
    if x > limit {
        return Err(Error::Capacity {
            requested: x,
            limit,
        });
    }
    Ok(())
}

/// Smallest-prime-factor table on `[0, X]`; `spf[0] = 0`, `spf[1] = 1`.
#[derive(Clone, Debug)]
pub struct SpfTable {
    upper_bound: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfTable {
    pub fn upper_bound(&self) -> u64 {
        self.upper_bound
    }

    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.spf
    }

    /// All primes `≤ X` in increasing order.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf(n) == n
    }

    /// Prime factorization `[(p, e)]` with increasing `p`.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(
            n >= 1 && n <= self.upper_bound,
            "factorize({n}) outside table [1, {}]",
            self.upper_bound
        );
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf(n);
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Calls `visit(p, e)` for each prime power exactly dividing `n`.
    #[inline]
    pub fn for_each_prime_power(&self, mut n: u64, mut visit: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.spf(n);
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            visit(p, e);
        }
    }
}

/// Linear sieve for the smallest prime factor of every `n ≤ X`.
pub fn sieve_spf(x: u64) -> Result<SpfTable> {
    sieve_spf_with_limit(x, DEFAULT_MAX_ENTRIES)
}

pub fn sieve_spf_with_limit(x: u64, limit: u64) -> Result<SpfTable> {
    check_capacity(x, limit)?;
    if x < 1 {
        return Err(Error::Domain("sieve bound must be at least 1".into()));
    }
    let n = x as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    spf[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > si || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    Ok(SpfTable {
        upper_bound: x,
        spf,
        primes,
    })
}

/// Linear sieve over an `i8` value array for a multiplicative function whose
/// value at primes is `prime_value` and which satisfies
/// `v(i·p) = step(v(i), p | i)` when `p` is the least prime of `i·p`.
fn linear_sieve_i8(x: u64, prime_value: i8, step: impl Fn(i8, bool) -> i8) -> Vec<i8> {
    const UNSET: i8 = i8::MIN;
    let n = x as usize;
    let mut v = vec![UNSET; n + 1];
    v[0] = 0;
    if n >= 1 {
        v[1] = 1;
    }
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if v[i] == UNSET {
            v[i] = prime_value;
            primes.push(i as u32);
        }
        let vi = v[i];
        for &p in &primes {
            let p = p as usize;
            let ip = i * p;
            if ip > n {
                break;
            }
            if i % p == 0 {
                v[ip] = step(vi, true);
                break;
            }
            v[ip] = step(vi, false);
        }
    }
    v
}

pub(crate) fn mobius_values(x: u64, limit: u64) -> Result<Vec<i8>> {
    check_capacity(x, limit)?;
    Ok(linear_sieve_i8(x, -1, |v, square| if square { 0 } else { -v }))
}

pub(crate) fn liouville_values(x: u64, limit: u64) -> Result<Vec<i8>> {
    check_capacity(x, limit)?;
    Ok(linear_sieve_i8(x, -1, |v, _| -v))
}
