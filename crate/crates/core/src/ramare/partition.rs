//! The split of `Σ_{n ≤ X} f(n) F(n)` along the Ramaré identity, and the
//! sums obtained by writing `n = pm`.

use super::window::{window_primes, RamareWindow};
use crate::arithfn::{sieve_spf, ArithTable};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::progressions::{tabulate_f, FSpec};
use num_complex::Complex64;
use rayon::prelude::*;

const BLOCK: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct DyadicSlice {
    /// Slice covers primes in `[p_lo, p_hi)`.
    pub p_lo: f64,
    pub p_hi: f64,
    pub value: Complex64,
    /// Last slice, cut short at `Z`.
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaPartition {
    /// `Σ_{n ≤ X} f(n) F(n)`.
    pub total: Complex64,
    /// Terms with `p² | n` for some windowed `p`.
    pub part_musq_zero: Complex64,
    /// Terms with no windowed prime factor.
    pub part_coprime: Complex64,
    /// `Σ_n f(n) F(n) Σ_{p | n} w(n/p)` over the remaining `n`.
    pub part_sigma: Complex64,
    /// `|total − (part_musq_zero + part_coprime + part_sigma)|`.
    pub residual: f64,
    /// `Σ_n |F(n)|`.
    pub f_mass: f64,
    /// The same `Σ`, summed as `Σ_p Σ_{m ≤ X/p}` with `μ²_{[Y,Z)}(pm) = 1`.
    pub sigma_pm: Complex64,
    /// `Σ_p Σ_m f(pm) F(pm) w(m)` minus `Σ` (the pairs with `μ²(pm) = 0`).
    pub remainder_musq: Complex64,
    /// `Σ′` minus the previous sum: pairs where `f(pm) ≠ f(p) f(m)`, i.e. `p | m`.
    pub remainder_coprime: Complex64,
    /// `Σ′ = Σ_p Σ_{m ≤ X/p} f(p) f(m) F(pm) w(m)`.
    pub sigma_prime: Complex64,
    pub slices: Vec<DyadicSlice>,
}

impl SigmaPartition {
    pub fn tolerance(&self) -> f64 {
        1e-9 * (1.0 + self.f_mass)
    }

    /// `|Σ′ − Σ_j Σ′(P_j)|`.
    pub fn slice_residual(&self) -> f64 {
        let s: CompensatedSum = self.slices.iter().map(|s| s.value).collect();
        (self.sigma_prime - s.value()).norm()
    }
}

/// Windowed prime counts (distinct) and `μ²_{[Y,Z)}` for `0..=x`.
struct WindowTables {
    count: Vec<u8>,
    musq: Vec<bool>,
    spf: crate::arithfn::SpfTable,
}

impl WindowTables {
    fn new(x: u64, w: &RamareWindow) -> Result<Self> {
        let spf = sieve_spf(x.max(2))?;
        let n = x as usize;
        let mut count = vec![0u8; n + 1];
        let mut musq = vec![true; n + 1];
        for m in 2..=n {
            let p = spf.spf(m as u64) as usize;
            let r = m / p;
            let inw = w.contains(p as u64);
            if r.is_multiple_of(p) {
                count[m] = count[r];
                musq[m] = musq[r] && !inw;
            } else {
                count[m] = count[r] + inw as u8;
                musq[m] = musq[r];
            }
        }
        Ok(WindowTables { count, musq, spf })
    }

    fn weight(&self, m: usize) -> f64 {
        1.0 / (self.count[m] as f64 + 1.0)
    }
}

fn check_cover(f: &ArithTable, spec: &FSpec) -> Result<()> {
    if f.upper_bound() < spec.x() {
        return Err(Error::Coverage(format!(
            "table bound {} below X = {}",
            f.upper_bound(),
            spec.x()
        )));
    }
    Ok(())
}

pub fn sigma_partition(f: &ArithTable, spec: &FSpec, w: &RamareWindow) -> Result<SigmaPartition> {
    check_cover(f, spec)?;
    let x = spec.x() as usize;
    let big_f = tabulate_f(spec);
    let fv = big_f.values();
    let wt = WindowTables::new(spec.x(), w)?;

    // n-route, in blocks reduced in block order
    let blocks: Vec<[CompensatedSum; 4]> = (0..x.div_ceil(BLOCK).max(1))
        .into_par_iter()
        .map(|b| {
            let mut acc = [CompensatedSum::new(); 4];
            let lo = (b * BLOCK).max(1);
            let hi = ((b + 1) * BLOCK).min(x + 1);
            for n in lo..hi {
                let t = f.get(n as u64) * fv[n];
                if t.norm_sqr() == 0.0 {
                    continue;
                }
                acc[0].add(t);
                if !wt.musq[n] {
                    acc[1].add(t);
                } else if wt.count[n] == 0 {
                    acc[2].add(t);
                } else {
                    let mut s = 0.0;
                    wt.spf.for_each_prime_power(n as u64, |p, _| {
                        if w.contains(p) {
                            s += wt.weight(n / p as usize);
                        }
                    });
                    acc[3].add(t * s);
                }
            }
            acc
        })
        .collect();
    let mut parts = [CompensatedSum::new(); 4];
    for b in &blocks {
        for i in 0..4 {
            parts[i].add(b[i].value());
        }
    }
    let [total, musq0, coprime, sigma] = parts.map(|c| c.value());
    let f_mass: f64 = {
        let s: CompensatedSum = fv[1..].iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
        s.value().re
    };

    // pm-route, per prime, reduced in prime order
    let primes: Vec<u64> = window_primes(w)?.into_iter().filter(|&p| p as usize <= x).collect();
    let per_p: Vec<[Complex64; 4]> = primes
        .par_iter()
        .map(|&p| {
            let p = p as usize;
            let fp = f.get(p as u64);
            let mut acc = [CompensatedSum::new(); 4];
            for m in 1..=x / p {
                let n = p * m;
                if fv[n].norm_sqr() == 0.0 {
                    continue;
                }
                let wm = wt.weight(m);
                let fn_ = f.get(n as u64);
                let split = fp * f.get(m as u64);
                let a = fn_ * fv[n] * wm;
                if wt.musq[n] {
                    acc[0].add(a);
                } else {
                    acc[1].add(a);
                }
                acc[2].add((split - fn_) * fv[n] * wm);
                acc[3].add(split * fv[n] * wm);
            }
            acc.map(|c| c.value())
        })
        .collect();
    let mut pm = [CompensatedSum::new(); 4];
    for v in &per_p {
        for i in 0..4 {
            pm[i].add(v[i]);
        }
    }
    let [sigma_pm, remainder_musq, remainder_coprime, sigma_prime] = pm.map(|c| c.value());

    let mut slices = Vec::new();
    let mut lo = w.y;
    while lo < w.z {
        let hi = (2.0 * lo).min(w.z);
        let mut s = CompensatedSum::new();
        for (i, &p) in primes.iter().enumerate() {
            let pf = p as f64;
            if pf >= lo && pf < hi {
                s.add(per_p[i][3]);
            }
        }
        slices.push(DyadicSlice {
            p_lo: lo,
            p_hi: hi,
            value: s.value(),
            boundary: 2.0 * lo > w.z,
        });
        lo *= 2.0;
    }

    Ok(SigmaPartition {
        total,
        part_musq_zero: musq0,
        part_coprime: coprime,
        part_sigma: sigma,
        residual: (total - (musq0 + coprime + sigma)).norm(),
        f_mass,
        sigma_pm,
        remainder_musq,
        remainder_coprime,
        sigma_prime,
        slices,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsGap {
    pub p: f64,
    /// `Σ′(P)` restricted to windowed primes in `[P, 2P)`.
    pub slice: Complex64,
    /// `|Σ′(P)|²`.
    pub lhs: f64,
    /// `(X/P) Σ_{m ≤ X/P} |Σ_{P ≤ p < 2P, p ≤ X/m} f(p) F(pm)|²`.
    pub rhs: f64,
    pub ok: bool,
}

impl CsGap {
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Both sides of the Cauchy–Schwarz step for the slice at `P`.
pub fn cauchy_schwarz_gap(f: &ArithTable, spec: &FSpec, w: &RamareWindow, p_scale: f64) -> Result<CsGap> {
    check_cover(f, spec)?;
    if !(p_scale >= 1.0) {
        return Err(Error::Domain(format!("P must be at least 1, got {p_scale}")));
    }
    let x = spec.x() as usize;
    let big_f = tabulate_f(spec);
    let fv = big_f.values();
    let wt = WindowTables::new(spec.x(), w)?;
    let primes: Vec<usize> = window_primes(w)?
        .into_iter()
        .filter(|&p| (p as f64) >= p_scale && (p as f64) < 2.0 * p_scale && p as usize <= x)
        .map(|p| p as usize)
        .collect();
    let m_max = (x as f64 / p_scale).floor() as usize;
    let mut slice = CompensatedSum::new();
    let mut sq = CompensatedSum::new();
    for m in 1..=m_max {
        let mut inner = Complex64::new(0.0, 0.0);
        for &p in &primes {
            if p * m > x {
                break;
            }
            inner += f.get(p as u64) * fv[p * m];
        }
        slice.add(wt.weight(m) * f.get(m as u64) * inner);
        sq.add_real(inner.norm_sqr());
    }
    let slice = slice.value();
    let lhs = slice.norm_sqr();
    let rhs = x as f64 / p_scale * sq.value().re;
    Ok(CsGap {
        p: p_scale,
        slice,
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithfn::{sieve_mobius, unit_table};
    use crate::phases::PolyPhase;
    use crate::progressions::ProgressionSpec;

    fn single(q: u64, a: u64, x: u64) -> FSpec {
        let p = ProgressionSpec::new(q, a, 0, x).unwrap();
        FSpec::new(q, x, vec![(p, PolyPhase::zero(1))]).unwrap()
    }

    #[test]
    fn unit_single_progression() {
        let x = 10_000;
        let spec = single(3, 1, x);
        let w = RamareWindow::new(10.0, 100.0).unwrap();
        let r = sigma_partition(&unit_table(x).unwrap(), &spec, &w).unwrap();
        assert!(r.residual <= r.tolerance());
        assert!((r.total.re - 3334.0).abs() < 1e-9);
        assert!((r.sigma_pm - r.part_sigma).norm() < 1e-9);
        assert!((r.sigma_prime - (r.sigma_pm + r.remainder_musq + r.remainder_coprime)).norm() < 1e-9);
        assert!(r.slice_residual() < 1e-9);
        // unit is completely multiplicative
        assert!(r.remainder_coprime.norm() < 1e-12);
    }

    #[test]
    fn empty_spec() {
        let spec = FSpec::empty(5, 2000);
        let w = RamareWindow::new(3.0, 10.0).unwrap();
        let r = sigma_partition(&sieve_mobius(2000).unwrap(), &spec, &w).unwrap();
        for z in [r.total, r.part_musq_zero, r.part_coprime, r.part_sigma, r.sigma_prime] {
            assert_eq!(z, Complex64::new(0.0, 0.0));
        }
        let g = cauchy_schwarz_gap(&sieve_mobius(2000).unwrap(), &spec, &w, 3.0).unwrap();
        assert_eq!((g.lhs, g.rhs, g.ok), (0.0, 0.0, true));
    }

    #[test]
    fn brute_force_parts() {
        let x = 3000;
        let spec = FSpec::random(3, 10, x, 4, 1).unwrap();
        let f = sieve_mobius(x).unwrap();
        let w = RamareWindow::new(3.0, 30.0).unwrap();
        let r = sigma_partition(&f, &spec, &w).unwrap();
        let spf = sieve_spf(x).unwrap();
        let fv = tabulate_f(&spec);
        let (mut z, mut c) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for n in 1..=x {
            let t = f.get(n) * fv.values()[n as usize];
            let fac = spf.factorize(n);
            if fac.iter().any(|&(p, e)| e >= 2 && w.contains(p)) {
                z += t;
            } else if fac.iter().all(|&(p, _)| !w.contains(p)) {
                c += t;
            }
        }
        assert!((r.part_musq_zero - z).norm() < 1e-9);
        assert!((r.part_coprime - c).norm() < 1e-9);
        assert!(r.residual <= r.tolerance());
        assert_eq!(r.slices.len(), 4);
        assert!(r.slices.last().unwrap().boundary);
    }

    #[test]
    fn slice_matches_cs_slice() {
        let x = 10_000;
        let spec = FSpec::random(8, 20, x, 6, 2).unwrap();
        let f = sieve_mobius(x).unwrap();
        let w = RamareWindow::new(10.0, 100.0).unwrap();
        let r = sigma_partition(&f, &spec, &w).unwrap();
        let g = cauchy_schwarz_gap(&f, &spec, &w, 10.0).unwrap();
        assert!(g.ok);
        assert!((g.slice - r.slices[0].value).norm() < 1e-9);
    }
}
