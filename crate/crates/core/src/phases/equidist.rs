//! Total equidistribution on the torus: the largest normalized Weyl sum over
//! all long sub-progressions of `[0, N)` and all small frequencies.

use super::{fixed, PolyPhase};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Improvements smaller than this do not replace the current witness, so
/// exact ties resolve to the smallest frequency, then the smallest step.
const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub start: u64,
    pub step: u64,
    pub length: u64,
    pub frequency: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquidistReport {
    pub delta: f64,
    pub n: u64,
    pub defect: f64,
    pub witness: Witness,
    /// Number of (progression, frequency) pairs examined.
    pub evaluations: u64,
}

impl EquidistReport {
    /// Totally δ-equidistributed means no tested average reaches above δ.
    pub fn is_equidistributed(&self) -> bool {
        self.defect <= self.delta
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EquidistOptions {
    /// Largest frequency tested; `None` means `⌈1/δ⌉`.
    pub freq_cutoff: Option<u64>,
    /// Maximum number of (progression, frequency) evaluations.
    pub budget: f64,
}

impl Default for EquidistOptions {
    fn default() -> Self {
        EquidistOptions {
            freq_cutoff: None,
            budget: 2e10,
        }
    }
}

fn pairs_with_min_len(len: u64, min_len: u64) -> u64 {
    if len < min_len {
        return 0;
    }
    let k = len - min_len + 1;
    k * (k + 1) / 2
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    witness: Witness,
}

/// Best normalized sum for one (step, frequency) pair, over every residue
/// chain and every contiguous window of length ≥ `min_len`. Windows are
/// scanned by increasing start and decreasing end.
fn scan_block(phi: &PolyPhase, n: u64, step: u64, m: i64, min_len: u64) -> Option<Best> {
    let scaled = phi.scaled(m);
    let mut best: Option<Best> = None;
    let mut prefix: Vec<Complex64> = Vec::new();
    for r in 0..step.min(n) {
        let len = (n - r).div_ceil(step);
        if len < min_len {
            continue;
        }
        prefix.clear();
        prefix.push(Complex64::new(0.0, 0.0));
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..len {
            acc += fixed::cis(scaled.eval_fixed((r + j * step) as i128));
            prefix.push(acc);
        }
        let mut cur = best.map_or(-1.0, |b| b.value);
        let mut thr = if cur < 0.0 { -1.0 } else { (cur + TIE_TOL).powi(2) };
        for a in 0..=(len - min_len) {
            let pa = prefix[a as usize];
            for b in (a + min_len..=len).rev() {
                let s = prefix[b as usize] - pa;
                let l = (b - a) as f64;
                if s.norm_sqr() > thr * l * l {
                    cur = s.norm() / l;
                    thr = (cur + TIE_TOL).powi(2);
                    best = Some(Best {
                        value: cur,
                        witness: Witness {
                            start: r + a * step,
                            step,
                            length: b - a,
                            frequency: m,
                        },
                    });
                }
            }
        }
    }
    best
}

/// Searches every sub-progression of `[0, N)` with step `d ≤ ⌈1/δ⌉` and
/// length `≥ δN`, and every frequency `1 ≤ m ≤ cutoff`, for the largest
/// `|average of e(m·φ(n))|`. Negative frequencies give conjugate averages of
/// the same modulus and are not enumerated separately.
pub fn equidist_defect(
    phi: &PolyPhase,
    n: u64,
    delta: f64,
    opts: EquidistOptions,
) -> Result<EquidistReport> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    if (n as f64) < 2.0 / delta {
        return Err(Error::Domain(format!(
            "N = {n} is below 2/delta = {}",
            2.0 / delta
        )));
    }
    let max_step = (1.0 / delta).ceil() as u64;
    let max_freq = opts.freq_cutoff.unwrap_or(max_step).max(1);
    let min_len = (delta * n as f64).ceil() as u64;

    let per_freq: u64 = (1..=max_step)
        .map(|d| {
            (0..d.min(n))
                .map(|r| pairs_with_min_len((n - r).div_ceil(d), min_len))
                .sum::<u64>()
        })
        .sum();
    let evaluations = per_freq * max_freq;
    if evaluations as f64 > opts.budget {
        return Err(Error::Cost {
            estimated: evaluations as f64,
            budget: opts.budget,
        });
    }

    let blocks: Vec<(u64, i64)> = (1..=max_freq as i64)
        .flat_map(|m| (1..=max_step).map(move |d| (d, m)))
        .collect();
    let results: Vec<Option<Best>> = blocks
        .par_iter()
        .map(|&(d, m)| scan_block(phi, n, d, m, min_len))
        .collect();

    let mut best: Option<Best> = None;
    for b in results.into_iter().flatten() {
        match best {
            Some(cur) if b.value <= cur.value + TIE_TOL => {}
            _ => best = Some(b),
        }
    }
    let best = best.expect("N ≥ 2/δ guarantees at least one progression");
    Ok(EquidistReport {
        delta,
        n,
        defect: best.value.min(1.0),
        witness: best.witness,
        evaluations,
    })
}
