//! Correlation sums of arithmetic functions along progressions, discrepancy
//! scans over a dyadic range of moduli, and the function `F`.

mod fspec;
mod sup;

pub use fspec::{divisible_mass, eval_f, tabulate_f, tabulate_f_to, FSpec};
pub use sup::{farey_points, sup_correlation, SupOptions, SupResult};

use crate::arithfn::{ArithTable, Values};
use crate::error::{Error, Result};
use crate::numeric::{euler_phi, gcd, CompensatedSum};
use crate::phases::PolyPhase;
use num_complex::Complex64;
use rayon::prelude::*;

/// Residue class `a mod q` restricted to `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProgressionSpec {
    pub q: u64,
    pub a: u64,
    pub lo: u64,
    pub hi: u64,
}

impl ProgressionSpec {
    pub fn new(q: u64, a: u64, lo: u64, hi: u64) -> Result<Self> {
        if q == 0 || a >= q {
            return Err(Error::Domain(format!("need 0 <= a < q, got q={q}, a={a}")));
        }
        if gcd(a, q) != 1 {
            return Err(Error::Domain(format!("residue {a} is not reduced modulo {q}")));
        }
        if lo > hi {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(ProgressionSpec { q, a, lo, hi })
    }

    /// Smallest `n ≥ lo` with `n ≡ a (q)`.
    pub fn first(&self) -> u64 {
        if self.lo <= self.a {
            self.a
        } else {
            self.lo + (self.q - (self.lo - self.a) % self.q) % self.q
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.lo && n <= self.hi && n % self.q == self.a
    }

    /// Terms in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = u64> {
        let (q, hi) = (self.q, self.hi);
        let first = self.first();
        (0..)
            .map(move |j| first + j * q)
            .take_while(move |&n| n <= hi)
    }

    pub fn count(&self) -> u64 {
        let f = self.first();
        if f > self.hi {
            0
        } else {
            (self.hi - f) / self.q + 1
        }
    }
}

/// `Σ_{n ∈ I_q, n ≡ a_q (q)} f(n) e(φ((n − a_q)/q))` with compensated
/// accumulation in increasing `n`.
pub fn correlation_sum(table: &ArithTable, p: &ProgressionSpec, phi: &PolyPhase) -> Result<Complex64> {
    if p.hi > table.upper_bound() {
        return Err(Error::Coverage(format!(
            "interval end {} exceeds table bound {}",
            p.hi,
            table.upper_bound()
        )));
    }
    let mut acc = CompensatedSum::new();
    for n in p.terms() {
        let v = table.get(n);
        if v.norm_sqr() > 0.0 {
            acc.add(v * phi.value(((n - p.a) / p.q) as i128));
        }
    }
    Ok(acc.value())
}

/// Sums of `f(n)` over each residue class mod `q`, `1 ≤ n ≤ X`.
pub fn residue_sums(table: &ArithTable, q: u64, x: u64) -> Result<Vec<Complex64>> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if x > table.upper_bound() {
        return Err(Error::Coverage(format!("X = {x} exceeds table bound {}", table.upper_bound())));
    }
    let q = q as usize;
    Ok(match table.values() {
        Values::Small(v) => {
            let mut s = vec![0i64; q];
            let mut r = 1 % q;
            for &val in &v[1..=x as usize] {
                s[r] += val as i64;
                r += 1;
                if r == q {
                    r = 0;
                }
            }
            s.into_iter().map(|t| Complex64::new(t as f64, 0.0)).collect()
        }
        Values::Complex(v) => {
            let mut s = vec![CompensatedSum::new(); q];
            for (n, &val) in v.iter().enumerate().take(x as usize + 1).skip(1) {
                s[n % q].add(val);
            }
            s.into_iter().map(|c| c.value()).collect()
        }
    })
}

/// `max_{(a,q)=1} |Σ_{n ≤ X, n ≡ a} f(n) − (1/φ(q)) Σ_{n ≤ X, (n,q)=1} f(n)|`
/// together with the maximizing residue.
pub fn bv_discrepancy_witness(table: &ArithTable, q: u64, x: u64) -> Result<(u64, f64)> {
    if q == 0 || q > x {
        return Err(Error::Domain(format!("need 1 <= q <= X, got q={q}, X={x}")));
    }
    let sums = residue_sums(table, q, x)?;
    let reduced: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
    let mut total = CompensatedSum::new();
    for &a in &reduced {
        total.add(sums[a as usize]);
    }
    let mean = total.value() / euler_phi(q) as f64;
    let mut best = (reduced[0], -1.0);
    for &a in &reduced {
        let d = (sums[a as usize] - mean).norm();
        if d > best.1 {
            best = (a, d);
        }
    }
    Ok(best)
}

pub fn bv_discrepancy(table: &ArithTable, q: u64, x: u64) -> Result<f64> {
    Ok(bv_discrepancy_witness(table, q, x)?.1)
}

/// What each modulus is scored by in [`exceptional_scan`].
#[derive(Clone, Debug)]
pub enum PhaseSource {
    /// Bombieri–Vinogradov discrepancy, no phase.
    None,
    /// `max_a |correlation_sum|` with one fixed phase.
    Fixed(PolyPhase),
    /// [`sup_correlation`] with the given options.
    Sup(SupOptions),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvRow {
    pub q: u64,
    pub a: u64,
    pub alphas: Vec<f64>,
    pub value: f64,
    pub threshold: f64,
    pub exceptional: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvReport {
    pub q_base: u64,
    pub x: u64,
    pub epsilon: f64,
    pub rows: Vec<BvRow>,
    pub exceptional_count: usize,
    pub mean_value: f64,
    pub max_value: f64,
    pub budget_exhausted: bool,
}

impl BvReport {
    pub fn exceptional_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.exceptional_count as f64 / self.rows.len() as f64
        }
    }
}

/// Checks the standing hypothesis `10Q² ≤ X`.
pub fn check_q_range(q_base: u64, x: u64) -> Result<()> {
    if q_base == 0 || 10u128 * (q_base as u128).pow(2) > x as u128 {
        return Err(Error::Hypothesis {
            constraint: "10Q² ≤ X",
            context: format!("Q = {q_base}, X = {x}"),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ScanOptions {
    /// Scan `1 ≤ q ≤ Q` instead of the dyadic window `Q ≤ q < 2Q`.
    pub full_range: bool,
}

/// Scores every modulus in the window and flags `value ≥ ε·X/Q`.
pub fn exceptional_scan(
    table: &ArithTable,
    q_base: u64,
    x: u64,
    source: &PhaseSource,
    epsilon: f64,
    opts: ScanOptions,
) -> Result<BvReport> {
    check_q_range(q_base, x)?;
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if x > table.upper_bound() {
        return Err(Error::Coverage(format!("X = {x} exceeds table bound {}", table.upper_bound())));
    }
    let threshold = epsilon * x as f64 / q_base as f64;
    let moduli: Vec<u64> = if opts.full_range {
        (1..=q_base).collect()
    } else {
        (q_base..2 * q_base).collect()
    };
    let scored: Vec<Result<(BvRow, bool)>> = moduli
        .par_iter()
        .map(|&q| {
            let (a, alphas, value, ex) = match source {
                PhaseSource::None => {
                    let (a, v) = bv_discrepancy_witness(table, q, x)?;
                    (a, Vec::new(), v, false)
                }
                PhaseSource::Fixed(phi) => {
                    let mut best = (0, -1.0);
                    for a in (0..q).filter(|&a| gcd(a, q) == 1) {
                        let v = correlation_sum(table, &ProgressionSpec::new(q, a, 0, x)?, phi)?.norm();
                        if v > best.1 {
                            best = (a, v);
                        }
                    }
                    (best.0, phi.alphas(), best.1, false)
                }
                PhaseSource::Sup(o) => {
                    let r = sup_correlation(table, q, x, o)?;
                    (r.a, r.phase.alphas(), r.value, r.budget_exhausted)
                }
            };
            Ok((
                BvRow {
                    q,
                    a,
                    alphas,
                    value,
                    threshold,
                    exceptional: value >= threshold,
                },
                ex,
            ))
        })
        .collect();
    let mut rows = Vec::with_capacity(scored.len());
    let mut budget_exhausted = false;
    for r in scored {
        let (row, ex) = r?;
        budget_exhausted |= ex;
        rows.push(row);
    }
    let exceptional_count = rows.iter().filter(|r| r.exceptional).count();
    let mean_value = rows.iter().map(|r| r.value).sum::<f64>() / rows.len().max(1) as f64;
    let max_value = rows.iter().map(|r| r.value).fold(0.0, f64::max);
    Ok(BvReport {
        q_base,
        x,
        epsilon,
        rows,
        exceptional_count,
        mean_value,
        max_value,
        budget_exhausted,
    })
}
