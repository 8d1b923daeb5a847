//! Multiplicities `m_q(r) = #{Q ≤ q′ < 2Q : R ≤ [q,q′] < 2R, [q,q′] = r}`.

use crate::error::{Error, Result};
use crate::numeric::gcd;
use rayon::prelude::*;
use std::collections::BTreeMap;

pub const LCM_MAX_Q: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LcmStats {
    pub q_base: u64,
    pub r: u64,
    /// `D = Q² / 2R`.
    pub d: f64,
    /// For each `q = Q + i`: sorted `(r, m_q(r))` with `m_q(r) ≥ 1`.
    pub multiplicities: Vec<Vec<(u64, u32)>>,
    /// For each `q`: `#{q′ : (q, q′) ∈ E}`.
    pub degrees: Vec<u64>,
    /// Number of pairs `(q, q′) ∈ E` with `m_q([q,q′]) = m`, keyed by `m`.
    pub histogram: BTreeMap<u32, u64>,
    /// `σ_D(q)` for each `q`.
    pub sigma: Vec<u64>,
}

impl LcmStats {
    pub fn pair_count(&self) -> u64 {
        self.degrees.iter().sum()
    }

    /// `#{(q, q′) ∈ E : m_q([q,q′]) ≥ m0}`.
    pub fn tail_count(&self, m0: u32) -> u64 {
        self.histogram.range(m0..).map(|(_, &c)| c).sum()
    }

    /// Entries with `m_q(r) > σ_D(q)`.
    pub fn violations(&self) -> Vec<(u64, u64, u32)> {
        let mut out = Vec::new();
        for (i, row) in self.multiplicities.iter().enumerate() {
            for &(r, m) in row {
                if m as u64 > self.sigma[i] {
                    out.push((self.q_base + i as u64, r, m));
                }
            }
        }
        out
    }

    pub fn multiplicity(&self, q: u64, r: u64) -> u32 {
        let row = &self.multiplicities[(q - self.q_base) as usize];
        row.binary_search_by_key(&r, |&(x, _)| x).map(|i| row[i].1).unwrap_or(0)
    }
}

/// Number of divisors of `q` in `[D, 8D]`.
pub fn sigma_d(q: u64, d: f64) -> u64 {
    let mut c = 0;
    let mut i = 1;
    while i * i <= q {
        if q.is_multiple_of(i) {
            for t in [i, q / i] {
                if t as f64 >= d && t as f64 <= 8.0 * d {
                    c += 1;
                }
            }
            if i * i == q && (i as f64) >= d && (i as f64) <= 8.0 * d {
                c -= 1;
            }
        }
        i += 1;
    }
    c
}

/// `Σ_{Q ≤ q < 2Q} σ_D(q)²`.
pub fn sigma_d_second_moment(q_base: u64, d: f64) -> u64 {
    (q_base..2 * q_base).map(|q| sigma_d(q, d).pow(2)).sum()
}

pub fn lcm_stats(q_base: u64, r: u64) -> Result<LcmStats> {
    if q_base == 0 {
        return Err(Error::Domain("Q must be positive".into()));
    }
    if q_base > LCM_MAX_Q {
        return Err(Error::Cost {
            estimated: (q_base as f64).powi(2),
            budget: (LCM_MAX_Q as f64).powi(2),
        });
    }
    if r < q_base || r as u128 > 4 * (q_base as u128).pow(2) {
        return Err(Error::Domain(format!("need Q <= R <= 4Q², got Q={q_base}, R={r}")));
    }
    let d = (q_base as f64).powi(2) / (2.0 * r as f64);
    let rows: Vec<(Vec<(u64, u32)>, u64, u64)> = (q_base..2 * q_base)
        .into_par_iter()
        .map(|q| {
            let mut l: Vec<u64> = (q_base..2 * q_base)
                .map(|qp| q / gcd(q, qp) * qp)
                .filter(|&x| x >= r && x < 2 * r)
                .collect();
            l.sort_unstable();
            let deg = l.len() as u64;
            let mut row: Vec<(u64, u32)> = Vec::new();
            for x in l {
                match row.last_mut() {
                    Some((y, c)) if *y == x => *c += 1,
                    _ => row.push((x, 1)),
                }
            }
            (row, deg, sigma_d(q, d))
        })
        .collect();
    let mut histogram = BTreeMap::new();
    let mut multiplicities = Vec::with_capacity(rows.len());
    let mut degrees = Vec::with_capacity(rows.len());
    let mut sigma = Vec::with_capacity(rows.len());
    for (row, deg, s) in rows {
        for &(_, m) in &row {
            *histogram.entry(m).or_insert(0) += m as u64;
        }
        multiplicities.push(row);
        degrees.push(deg);
        sigma.push(s);
    }
    Ok(LcmStats {
        q_base,
        r,
        d,
        multiplicities,
        degrees,
        histogram,
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_d(12, 1.0), 5);
        assert_eq!(sigma_d(97, 2.0), 0);
        assert_eq!(sigma_d(36, 1.0), 5);
        for q in 1..300u64 {
            for d in [0.5, 1.0, 2.5, 7.0] {
                let brute = (1..=q).filter(|t| q % t == 0 && *t as f64 >= d && *t as f64 <= 8.0 * d).count();
                assert_eq!(sigma_d(q, d), brute as u64);
            }
        }
    }

    #[test]
    fn tiny_case() {
        let s = lcm_stats(2, 4).unwrap();
        assert_eq!(s.pair_count(), 2);
        assert_eq!(s.multiplicity(2, 6), 1);
        assert_eq!(s.multiplicity(3, 6), 1);
        assert_eq!(s.multiplicity(2, 4), 0);
    }

    #[test]
    fn brute_force_q10() {
        let s = lcm_stats(10, 100).unwrap();
        let mut pairs = 0;
        for q in 10..20u64 {
            let mut deg = 0;
            for qp in 10..20u64 {
                let l = q * qp / gcd(q, qp);
                if (100..200).contains(&l) {
                    pairs += 1;
                    deg += 1;
                    let m = (10..20u64).filter(|&x| q * x / gcd(q, x) == l).count();
                    assert_eq!(s.multiplicity(q, l), m as u32);
                }
            }
            assert_eq!(s.degrees[(q - 10) as usize], deg);
            let row_sum: u64 = s.multiplicities[(q - 10) as usize].iter().map(|&(_, m)| m as u64).sum();
            assert_eq!(row_sum, deg);
        }
        assert_eq!(s.pair_count(), pairs);
        assert_eq!(s.tail_count(1), pairs);
        assert!(s.violations().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(lcm_stats(10_001, 20_000), Err(Error::Cost { .. })));
        assert!(lcm_stats(10, 9).is_err());
        assert!(lcm_stats(10, 401).is_err());
    }
}
