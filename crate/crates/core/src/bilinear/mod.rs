//! Type-II bilinear sums over `F`, the per-modulus-pair decomposition of
//! those sums, and the lcm multiplicity statistics.

mod lcm;

pub use lcm::{lcm_stats, sigma_d, sigma_d_second_moment, LcmStats};

use crate::error::{Error, Result};
use crate::gowers::ComplexSeq;
use crate::numeric::{ext_gcd, gcd, CompensatedSum};
use crate::phases::{best_denominator, DioApprox, PolyPhase};
use crate::progressions::FSpec;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

/// The `ℓ`-interval used for each pair `(k, k′)`.
#[derive(Clone, Debug, Default)]
pub enum IntervalRule {
    /// `[0, L]` for every pair.
    #[default]
    Full,
    /// Explicit intervals; pairs not listed use `[0, L]`.
    Explicit(HashMap<(u64, u64), (u64, u64)>),
}

#[derive(Clone, Debug)]
pub struct TypeIIConfig {
    pub k: u64,
    pub l: u64,
    pub q: u64,
    pub delta: f64,
    pub intervals: IntervalRule,
}

impl TypeIIConfig {
    pub fn new(k: u64, l: u64, q: u64, delta: f64) -> Result<Self> {
        let cfg = TypeIIConfig {
            k,
            l,
            q,
            delta,
            intervals: IntervalRule::Full,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Domain("K must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::Domain(format!("delta must lie in (0, 1/2), got {}", self.delta)));
        }
        if 10u128 * (self.q as u128).pow(2) > self.l as u128 {
            return Err(Error::Hypothesis {
                constraint: "10Q² ≤ L",
                context: format!("Q = {}, L = {}", self.q, self.l),
            });
        }
        if let IntervalRule::Explicit(map) = &self.intervals {
            for (&(a, b), &(lo, hi)) in map {
                if lo > hi || hi > self.l {
                    return Err(Error::Domain(format!(
                        "interval [{lo}, {hi}] for ({a}, {b}) is not inside [0, {}]",
                        self.l
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn interval(&self, k: u64, kp: u64) -> (u64, u64) {
        match &self.intervals {
            IntervalRule::Full => (0, self.l),
            IntervalRule::Explicit(map) => map.get(&(k, kp)).copied().unwrap_or((0, self.l)),
        }
    }

    /// Largest argument `k ℓ` reached: `(2K − 1) L`.
    pub fn reach(&self) -> u64 {
        (2 * self.k - 1) * self.l
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypeIIResult {
    pub value: f64,
    /// `value / (K² L)`.
    pub normalized: f64,
    pub exceeds: bool,
}

fn finish(cfg: &TypeIIConfig, rows: Vec<f64>) -> TypeIIResult {
    let s: CompensatedSum = rows.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let value = s.value().re;
    let normalized = value / ((cfg.k as f64).powi(2) * cfg.l as f64);
    TypeIIResult {
        value,
        normalized,
        exceeds: normalized >= cfg.delta,
    }
}

/// `Σ_{K ≤ k, k′ < 2K} |Σ_{ℓ ∈ I(k,k′)} F(kℓ) conj F(k′ℓ)|` from tabulated `F`.
pub fn type2_sum(cfg: &TypeIIConfig, f: &ComplexSeq) -> Result<TypeIIResult> {
    cfg.validate()?;
    if (f.len() as u64) <= cfg.reach() {
        return Err(Error::Coverage(format!(
            "F tabulated to {}, needs {}",
            f.y(),
            cfg.reach()
        )));
    }
    let v = f.values();
    let rows: Vec<f64> = (cfg.k..2 * cfg.k)
        .into_par_iter()
        .map(|k| {
            let mut row = 0.0;
            for kp in cfg.k..2 * cfg.k {
                let (lo, hi) = cfg.interval(k, kp);
                let mut acc = Complex64::new(0.0, 0.0);
                for l in lo..=hi {
                    acc += v[(k * l) as usize] * v[(kp * l) as usize].conj();
                }
                row += acc.norm();
            }
            row
        })
        .collect();
    Ok(finish(cfg, rows))
}

/// Solves `k ℓ ≡ a (q)`, `k′ ℓ ≡ a′ (q′)`. Returns `(modulus, residue)` with
/// the residue reduced, or `None` when there is no solution.
pub fn congruence_merge(k: u64, kp: u64, q: u64, qp: u64, a: u64, ap: u64) -> Option<(u64, u64)> {
    let (m1, r1) = solve_linear(k, a, q)?;
    let (m2, r2) = solve_linear(kp, ap, qp)?;
    crt(r1, m1, r2, m2)
}

/// `k ℓ ≡ a (q)` as `ℓ ≡ r (m)`.
fn solve_linear(k: u64, a: u64, q: u64) -> Option<(u64, u64)> {
    if q == 0 {
        return None;
    }
    let g = gcd(k % q, q);
    let g = if g == 0 { q } else { g };
    if !a.is_multiple_of(g) {
        return None;
    }
    let m = q / g;
    if m == 1 {
        return Some((1, 0));
    }
    let inv = crate::numeric::mod_inverse((k / g) % m, m)?;
    Some((m, (((a / g) % m) as u128 * inv as u128 % m as u128) as u64))
}

fn crt(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let (g, p, _) = ext_gcd(m1 as i128, m2 as i128);
    let diff = r2 as i128 - r1 as i128;
    if diff % g != 0 {
        return None;
    }
    let l = m1 as i128 / g * m2 as i128;
    let step = (diff / g * p).rem_euclid(m2 as i128 / g);
    let x = (r1 as i128 + m1 as i128 * step).rem_euclid(l);
    Some((u64::try_from(l).ok()?, x as u64))
}

/// Coefficients of `m ↦ φ(scale·m + shift)`, exact mod 1.
pub fn composed_phase(phi: &PolyPhase, scale: u64, shift: u64) -> PolyPhase {
    let a = phi.fixed_coeffs();
    let s = a.len() - 1;
    // binomials mod 2^128, Pascal's triangle
    let mut binom = vec![vec![0u128; s + 1]; s + 1];
    for j in 0..=s {
        binom[j][0] = 1;
        for i in 1..=j {
            binom[j][i] = binom[j - 1][i - 1].wrapping_add(if i < j { binom[j - 1][i] } else { 0 });
        }
    }
    let sc = scale as u128;
    let sh = shift as u128;
    let mut out = vec![0u128; s + 1];
    for (i, o) in out.iter_mut().enumerate() {
        let si = sc.wrapping_pow(i as u32);
        let mut acc = 0u128;
        for j in i..=s {
            let term = a[j]
                .wrapping_mul(binom[j][i])
                .wrapping_mul(si)
                .wrapping_mul(sh.wrapping_pow((j - i) as u32));
            acc = acc.wrapping_add(term);
        }
        *o = acc;
    }
    PolyPhase::from_fixed(out).expect("degree preserved")
}

/// The inner sum `Σ_ℓ F(kℓ) conj F(k′ℓ)` assembled pair by pair over the
/// moduli of `spec`: each `(q, q′)` contributes a Weyl sum of composed
/// phases along `ℓ ≡ a(k,k′,q,q′) (mod [q,q′])`.
pub fn inner_sum_decomposed(spec: &FSpec, k: u64, kp: u64, lo: u64, hi: u64) -> Complex64 {
    let mut total = CompensatedSum::new();
    for (p, phi) in spec.entries() {
        for (pp, phip) in spec.entries() {
            let Some((modulus, b)) = congruence_merge(k, kp, p.q, pp.q, p.a, pp.a) else {
                continue;
            };
            // ℓ ∈ [lo, hi], kℓ ∈ I_q, k′ℓ ∈ I_q′
            let l_lo = lo.max(p.lo.div_ceil(k)).max(pp.lo.div_ceil(kp));
            let l_hi = hi.min(p.hi / k).min(pp.hi / kp);
            if l_lo > l_hi {
                continue;
            }
            // ℓ = modulus·m + b with m in [m_lo, m_hi]
            let m_lo = if l_lo <= b { 0 } else { (l_lo - b).div_ceil(modulus) };
            if b + m_lo * modulus > l_hi {
                continue;
            }
            let m_hi = (l_hi - b) / modulus;
            // (kℓ − a)/q = (k·modulus/q)·m + (k b − a)/q, and k b ≥ a
            let g1 = composed_phase(phi, k * modulus / p.q, (k * b - p.a) / p.q);
            let g2 = composed_phase(phip, kp * modulus / pp.q, (kp * b - pp.a) / pp.q);
            for m in m_lo..=m_hi {
                total.add(g1.value(m as i128) * g2.value(m as i128).conj());
            }
        }
    }
    total.value()
}

pub fn type2_sum_decomposed(cfg: &TypeIIConfig, spec: &FSpec) -> Result<TypeIIResult> {
    cfg.validate()?;
    let rows: Vec<f64> = (cfg.k..2 * cfg.k)
        .into_par_iter()
        .map(|k| {
            (cfg.k..2 * cfg.k)
                .map(|kp| {
                    let (lo, hi) = cfg.interval(k, kp);
                    inner_sum_decomposed(spec, k, kp, lo, hi).norm()
                })
                .sum()
        })
        .collect();
    Ok(finish(cfg, rows))
}

/// Best diophantine approximation of the phases of `spec` over `range`,
/// scanning every modulus. Returns the modulus and its approximation with
/// the smallest residual.
pub fn diophantine_witness(spec: &FSpec, range: f64, r_max: u64) -> Option<(u64, DioApprox)> {
    spec.entries()
        .iter()
        .map(|(p, phi)| (p.q, best_denominator(phi, range, r_max)))
        .min_by(|a, b| a.1.residual.total_cmp(&b.1.residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progressions::{eval_f, tabulate_f_to, ProgressionSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn merge_examples() {
        assert_eq!(congruence_merge(1, 1, 5, 5, 2, 2), Some((5, 2)));
        assert_eq!(congruence_merge(1, 1, 3, 5, 1, 2), Some((15, 7)));
        assert_eq!(congruence_merge(1, 1, 4, 6, 1, 2), None);
        assert_eq!(congruence_merge(2, 1, 4, 3, 1, 1), None);
    }

    #[test]
    fn merge_by_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut found = 0;
        for _ in 0..2000 {
            let q = rng.gen_range(1..60u64);
            let qp = rng.gen_range(1..60u64);
            let a = rng.gen_range(0..q);
            let ap = rng.gen_range(0..qp);
            let k = rng.gen_range(1..50u64);
            let kp = rng.gen_range(1..50u64);
            let brute = (0..q * qp).find(|&l| (k * l) % q == a && (kp * l) % qp == ap);
            match congruence_merge(k, kp, q, qp, a, ap) {
                Some((m, r)) => {
                    found += 1;
                    assert!(r < m);
                    assert_eq!((k * r) % q, a);
                    assert_eq!((kp * r) % qp, ap);
                    assert_eq!(brute, Some(r));
                }
                None => assert_eq!(brute, None),
            }
        }
        assert!(found > 100);
    }

    #[test]
    fn composed_examples() {
        let phi = PolyPhase::new(&[0.3]).unwrap();
        let c = composed_phase(&phi, 1, 0);
        assert_eq!(c, phi);
        let c = composed_phase(&phi, 4, 0);
        assert!((c.alpha(1) - 0.2).abs() < 1e-15);
        let phi = PolyPhase::from_ratios(&[(0, 1), (1, 8)]).unwrap();
        let c = composed_phase(&phi, 2, 3);
        assert_eq!(c.alpha(2), 0.5);
        assert_eq!(c.alpha(1), 0.5);
        assert_eq!(c.alpha(0), 0.125);
        for m in 0..1000i128 {
            assert!((c.value(m) - phi.value(2 * m + 3)).norm() < 1e-10);
        }
    }

    fn brute(cfg: &TypeIIConfig, spec: &FSpec) -> f64 {
        let mut total = 0.0;
        for k in cfg.k..2 * cfg.k {
            for kp in cfg.k..2 * cfg.k {
                let (lo, hi) = cfg.interval(k, kp);
                let mut acc = Complex64::new(0.0, 0.0);
                for l in lo..=hi {
                    acc += eval_f(spec, k * l) * eval_f(spec, kp * l).conj();
                }
                total += acc.norm();
            }
        }
        total
    }

    #[test]
    fn direct_route_matches_brute_force() {
        let cfg = TypeIIConfig::new(10, 200, 4, 0.1).unwrap();
        for seed in 0..3 {
            let spec = FSpec::random(seed, 4, cfg.reach(), 3, 2).unwrap();
            let f = tabulate_f_to(&spec, cfg.reach());
            let r = type2_sum(&cfg, &f).unwrap();
            assert!((r.value - brute(&cfg, &spec)).abs() < 1e-9 * (1.0 + r.value));
        }
    }

    #[test]
    fn decomposed_route_matches_direct() {
        let mut cfg = TypeIIConfig::new(6, 160, 4, 0.1).unwrap();
        let mut map = HashMap::new();
        map.insert((7, 9), (10, 90));
        cfg.intervals = IntervalRule::Explicit(map);
        for seed in 0..3 {
            let spec = FSpec::random(seed + 10, 4, cfg.reach(), 2, 2).unwrap();
            let f = tabulate_f_to(&spec, cfg.reach());
            let a = type2_sum(&cfg, &f).unwrap();
            let b = type2_sum_decomposed(&cfg, &spec).unwrap();
            assert!((a.value - b.value).abs() < 1e-9 * (1.0 + a.value), "{} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn zero_f_and_errors() {
        let cfg = TypeIIConfig::new(10, 200, 4, 0.1).unwrap();
        let f = tabulate_f_to(&FSpec::empty(4, 10), cfg.reach());
        let r = type2_sum(&cfg, &f).unwrap();
        assert_eq!((r.value, r.exceeds), (0.0, false));
        let short = tabulate_f_to(&FSpec::empty(4, 10), 100);
        assert!(matches!(type2_sum(&cfg, &short), Err(Error::Coverage(_))));
        assert!(matches!(TypeIIConfig::new(10, 200, 5, 0.1), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn single_progression_lattice_count() {
        // F = indicator of n ≡ 1 (mod 4): the inner sum counts ℓ with kℓ ≡ k′ℓ ≡ 1 (4)
        let cfg = TypeIIConfig::new(10, 200, 4, 0.1).unwrap();
        let p = ProgressionSpec::new(4, 1, 0, cfg.reach()).unwrap();
        let spec = FSpec::new(4, cfg.reach(), vec![(p, PolyPhase::zero(1))]).unwrap();
        let f = tabulate_f_to(&spec, cfg.reach());
        let r = type2_sum(&cfg, &f).unwrap();
        let mut count = 0u64;
        for k in 10..20u64 {
            for kp in 10..20u64 {
                for l in 0..=200u64 {
                    if (k * l) % 4 == 1 && (kp * l) % 4 == 1 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(r.value, count as f64);
    }
}
