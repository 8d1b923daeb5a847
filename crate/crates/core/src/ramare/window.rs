//! Ramaré weights for a prime window `[Y, Z)`.

use crate::arithfn::{sieve_spf, SpfTable};
use crate::error::{Error, Result};
use crate::progressions::ProgressionSpec;
use num_rational::Ratio;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamareWindow {
    pub y: f64,
    pub z: f64,
}

impl RamareWindow {
    pub fn new(y: f64, z: f64) -> Result<Self> {
        if !(y >= 2.0 && y < z && z.is_finite()) {
            return Err(Error::Hypothesis {
                constraint: "2 ≤ Y < Z",
                context: format!("Y = {y}, Z = {z}"),
            });
        }
        Ok(RamareWindow { y, z })
    }

    /// `Y = 1/η`, `Z = (X/Q²)^{1/20}`.
    pub fn from_parameters(eta: f64, x: u64, q_base: u64) -> Result<Self> {
        let z = (x as f64 / (q_base as f64).powi(2)).powf(1.0 / 20.0);
        Self::new(1.0 / eta, z)
    }

    #[inline]
    pub fn contains(&self, p: u64) -> bool {
        let p = p as f64;
        p >= self.y && p < self.z
    }
}

/// Primes in `[Y, Z)`.
pub fn window_primes(w: &RamareWindow) -> Result<Vec<u64>> {
    let top = w.z.ceil() as u64;
    let spf = sieve_spf(top.max(2))?;
    Ok(spf
        .primes()
        .iter()
        .map(|&p| p as u64)
        .filter(|&p| w.contains(p))
        .collect())
}

fn windowed_prime_count(n: u64, w: &RamareWindow, spf: &SpfTable) -> u64 {
    let mut c = 0;
    spf.for_each_prime_power(n, |p, _| {
        if w.contains(p) {
            c += 1;
        }
    });
    c
}

/// `w(n) = 1 / (#{Y ≤ p < Z : p | n} + 1)`.
pub fn ramare_weight(n: u64, w: &RamareWindow, spf: &SpfTable) -> Ratio<u64> {
    Ratio::new(1, windowed_prime_count(n, w, spf) + 1)
}

/// 1 unless some `p ∈ [Y, Z)` has `p² | n`.
pub fn musq_window(n: u64, w: &RamareWindow, spf: &SpfTable) -> u8 {
    let mut ok = 1;
    spf.for_each_prime_power(n, |p, e| {
        if e >= 2 && w.contains(p) {
            ok = 0;
        }
    });
    ok
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub lhs: Ratio<u64>,
    pub expected: u64,
    pub pass: bool,
}

/// `Σ_{Y ≤ p < Z, p | n} w(n/p)` against the indicator that such a `p`
/// exists. `None` when some windowed prime squared divides `n`.
pub fn ramare_identity_check(n: u64, w: &RamareWindow, spf: &SpfTable) -> Option<IdentityCheck> {
    if musq_window(n, w, spf) == 0 {
        return None;
    }
    let mut lhs = Ratio::from_integer(0u64);
    let mut any = false;
    spf.for_each_prime_power(n, |p, _| {
        if w.contains(p) {
            any = true;
            lhs += ramare_weight(n / p, w, spf);
        }
    });
    let expected = any as u64;
    Some(IdentityCheck {
        lhs,
        expected,
        pass: lhs == Ratio::from_integer(expected),
    })
}

/// Number of `n ∈ I_q`, `n ≡ a_q (q)`, with no prime factor in `[Y, Z)`,
/// by sieving the progression in segments.
pub fn coprime_window_count(p: &ProgressionSpec, w: &RamareWindow) -> Result<u64> {
    const SEG: u64 = 1 << 16;
    let primes = window_primes(w)?;
    let first = p.first();
    let len = p.count();
    if len == 0 {
        return Ok(0);
    }
    // For each prime not dividing q, the first index j with p | first + j q.
    let starts: Vec<(u64, u64)> = primes
        .iter()
        .filter(|&&r| !p.q.is_multiple_of(r))
        .map(|&r| {
            let qinv = crate::numeric::mod_inverse(p.q % r, r).expect("r prime, r ∤ q");
            let j = ((r - first % r) % r) * qinv % r;
            (r, j)
        })
        .collect();
    let mut count = 0;
    let mut mark = vec![false; SEG as usize];
    let mut lo = 0;
    while lo < len {
        let hi = (lo + SEG).min(len);
        mark[..(hi - lo) as usize].fill(false);
        for &(r, j0) in &starts {
            let mut j = if j0 >= lo { j0 } else { j0 + (lo - j0).div_ceil(r) * r };
            while j < hi {
                mark[(j - lo) as usize] = true;
                j += r;
            }
        }
        count += mark[..(hi - lo) as usize].iter().filter(|&&m| !m).count() as u64;
        lo = hi;
    }
    Ok(count)
}

/// `#progression · ∏_{p ∈ [Y,Z), p ∤ q} (1 − 1/p)`.
pub fn mertens_prediction(p: &ProgressionSpec, w: &RamareWindow) -> Result<f64> {
    let prod: f64 = window_primes(w)?
        .into_iter()
        .filter(|&r| !p.q.is_multiple_of(r))
        .map(|r| 1.0 - 1.0 / r as f64)
        .product();
    Ok(p.count() as f64 * prod)
}
