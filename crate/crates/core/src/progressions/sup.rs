//! Lower bounds for `sup_a sup_α |Σ_{n ≡ a (q)} f(n) e(φ_α((n − a)/q))|`.
//!
//! Per residue the search runs
//! 1. a joint scan of `(α_s, α_1)`: `α_s` over a uniform grid joined with
//!    the rationals `c/d`, `d ≤ 20`, and for each value an FFT scan of `α_1`
//!    (skipped for `s = 1`, where the coordinate scan is already global);
//! 2. coordinate ascent from the best joint-scan points, the zero phase and
//!    random starts. Each coordinate step scans that coefficient on the grid
//!    `j/P` by one FFT (bucketing `m^i mod P`), adds the rational grid, and
//!    refines the winner by golden-section search.

use crate::arithfn::ArithTable;
use crate::error::{Error, Result};
use crate::numeric::{derive_seed, gcd};
use crate::phases::{fixed, PolyPhase};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

const FAREY_MAX: u64 = 20;
const TOP_GRID: usize = 256;
const JOINT_CANDIDATES: usize = 4;
const MAX_CYCLES: usize = 6;

#[derive(Clone, Copy, Debug)]
pub struct SupOptions {
    /// Phase degree `s`.
    pub degree: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Budget in term evaluations; exhaustion returns the best point so far.
    pub max_evals: f64,
    pub refine_iters: usize,
}

impl Default for SupOptions {
    fn default() -> Self {
        SupOptions {
            degree: 1,
            restarts: 4,
            seed: 0,
            max_evals: 1e11,
            refine_iters: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupResult {
    pub a: u64,
    pub phase: PolyPhase,
    /// A lower bound on the supremum.
    pub value: f64,
    pub budget_exhausted: bool,
}

/// Reduced fractions `c/d` in `[0,1)` with `d ≤ FAREY_MAX`, as `(c, d)`.
pub fn farey_points() -> Vec<(u64, u64)> {
    let mut v = vec![(0, 1)];
    for d in 2..=FAREY_MAX {
        for c in 1..d {
            if gcd(c, d) == 1 {
                v.push((c, d));
            }
        }
    }
    v
}

struct Objective {
    /// `(m, f(a + q m))` for the nonzero terms.
    terms: Vec<(u64, Complex64)>,
    fft_len: usize,
    fft: Arc<dyn Fft<f64>>,
    farey: Vec<(u64, u64)>,
    evals: f64,
    budget: f64,
}

impl Objective {
    fn exhausted(&self) -> bool {
        self.evals > self.budget
    }

    fn value(&mut self, phi: &PolyPhase) -> f64 {
        self.evals += self.terms.len() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(m, c) in &self.terms {
            acc += c * phi.value(m as i128);
        }
        acc.norm()
    }

    /// `b_m = c_m e(φ(m) − α_i m^i)` and the monomials `m^i mod 2^128`.
    fn base(&mut self, phi: &PolyPhase, i: usize) -> (Vec<Complex64>, Vec<u128>) {
        let mut without = phi.clone();
        without.set_fixed(i, 0);
        self.evals += self.terms.len() as f64;
        let mut b = Vec::with_capacity(self.terms.len());
        let mut mono = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            b.push(c * without.value(m as i128));
            mono.push((m as u128).wrapping_pow(i as u32));
        }
        (b, mono)
    }

    fn line_value(&mut self, b: &[Complex64], mono: &[u128], t: u128) -> f64 {
        self.evals += b.len() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &x) in b.iter().zip(mono) {
            acc += c * fixed::cis(t.wrapping_mul(x));
        }
        acc.norm()
    }

    /// Best `t` over `{j/P}` ∪ Farey, by bucketing. Returns `(t, value)`.
    fn line_scan(&mut self, b: &[Complex64], mono: &[u128]) -> (u128, f64) {
        let p = self.fft_len;
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        for (c, &x) in b.iter().zip(mono) {
            buf[(x as usize) & (p - 1)] += c;
        }
        self.fft.process(&mut buf);
        self.evals += (p as f64) * (p as f64).log2() + b.len() as f64;
        let mut best = (0u128, -1.0f64);
        for (j, z) in buf.iter().enumerate() {
            let v = z.norm();
            if v > best.1 {
                best = (fixed::from_ratio(j as i64, p as u64), v);
            }
        }
        // rational grid through residue buckets mod d
        let mut by_d: Vec<Vec<Complex64>> = (0..=FAREY_MAX)
            .map(|d| vec![Complex64::new(0.0, 0.0); d as usize])
            .collect();
        for (c, &x) in b.iter().zip(mono) {
            for d in 1..=FAREY_MAX {
                by_d[d as usize][(x % d as u128) as usize] += c;
            }
        }
        self.evals += (b.len() as u64 * FAREY_MAX) as f64;
        for &(c, d) in &self.farey {
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, z) in by_d[d as usize].iter().enumerate() {
                acc += z * fixed::cis(fixed::from_ratio((c * r as u64) as i64, d));
            }
            if acc.norm() > best.1 {
                best = (fixed::from_ratio(c as i64, d), acc.norm());
            }
        }
        best
    }

    fn refine(&mut self, b: &[Complex64], mono: &[u128], t0: u128, v0: f64, iters: usize) -> (u128, f64) {
        let half = 1.0 / self.fft_len as f64;
        let at = |off: f64| t0.wrapping_add(fixed::from_f64(off));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (-half, half);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = self.line_value(b, mono, at(x1));
        let mut f2 = self.line_value(b, mono, at(x2));
        let mut best = (t0, v0);
        for _ in 0..iters {
            if f1 > best.1 {
                best = (at(x1), f1);
            }
            if f2 > best.1 {
                best = (at(x2), f2);
            }
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = self.line_value(b, mono, at(x1));
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = self.line_value(b, mono, at(x2));
            }
        }
        if f1 > best.1 {
            best = (at(x1), f1);
        }
        if f2 > best.1 {
            best = (at(x2), f2);
        }
        best
    }

    fn ascend(&mut self, mut phi: PolyPhase, iters: usize) -> (PolyPhase, f64) {
        let s = phi.degree();
        let mut cur = self.value(&phi);
        for _ in 0..MAX_CYCLES {
            let mut improved = false;
            for i in (1..=s).rev() {
                if self.exhausted() {
                    return (phi, cur);
                }
                let (b, mono) = self.base(&phi, i);
                let (t, v) = self.line_scan(&b, &mono);
                let (t, v) = self.refine(&b, &mono, t, v, iters);
                if v > cur * (1.0 + 1e-12) {
                    phi.set_fixed(i, t);
                    cur = v;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        (phi, cur)
    }

    /// Joint scan of `(α_s, α_1)`, other coefficients zero.
    fn joint_scan(&mut self, s: usize) -> Vec<(PolyPhase, f64)> {
        let mut tops: Vec<u128> = (0..TOP_GRID)
            .map(|j| fixed::from_ratio(j as i64, TOP_GRID as u64))
            .collect();
        tops.extend(self.farey.iter().map(|&(c, d)| fixed::from_ratio(c as i64, d)));
        let mut found = Vec::with_capacity(tops.len());
        for top in tops {
            if self.exhausted() {
                break;
            }
            let mut phi = PolyPhase::zero(s);
            phi.set_fixed(s, top);
            let (b, mono) = self.base(&phi, 1);
            let (t, v) = self.line_scan(&b, &mono);
            phi.set_fixed(1, t);
            found.push((phi, v));
        }
        found.sort_by(|x, y| y.1.total_cmp(&x.1));
        found.truncate(JOINT_CANDIDATES);
        found
    }
}

/// Best `(φ, value)` for one residue `a`.
fn sup_for_residue(
    table: &ArithTable,
    q: u64,
    a: u64,
    x: u64,
    opts: &SupOptions,
    budget: f64,
) -> (PolyPhase, f64, bool) {
    let terms: Vec<(u64, Complex64)> = (0..)
        .map(|m| (m, a + q * m))
        .take_while(|&(_, n)| n <= x)
        .map(|(m, n)| (m, table.get(n)))
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .collect();
    let len = ((x - a) / q + 1) as usize;
    let fft_len = (4 * len).next_power_of_two().max(1024);
    let fft = FftPlanner::new().plan_fft_inverse(fft_len);
    let mut obj = Objective {
        terms,
        fft_len,
        fft,
        farey: farey_points(),
        evals: 0.0,
        budget,
    };
    let s = opts.degree;
    let mut starts = vec![PolyPhase::zero(s)];
    if s >= 2 {
        starts.extend(obj.joint_scan(s).into_iter().map(|(p, _)| p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, (q << 32) | a));
    for _ in 0..opts.restarts {
        let alphas: Vec<f64> = (0..s).map(|_| rng.gen::<f64>()).collect();
        starts.push(PolyPhase::new(&alphas).expect("finite coefficients"));
    }
    let mut best = (PolyPhase::zero(s), obj.value(&PolyPhase::zero(s)));
    for start in starts {
        if obj.exhausted() {
            break;
        }
        let (phi, v) = obj.ascend(start, opts.refine_iters);
        if v > best.1 {
            best = (phi, v);
        }
    }
    let value = obj.value(&best.0);
    let exhausted = obj.exhausted();
    (best.0, value, exhausted)
}

/// Lower bound for the double supremum over reduced residues `a` and phases
/// of degree `opts.degree`, for `n ≡ a (q)` in `[0, X]`.
pub fn sup_correlation(table: &ArithTable, q: u64, x: u64, opts: &SupOptions) -> Result<SupResult> {
    if q == 0 || q > x {
        return Err(Error::Domain(format!("need 1 <= q <= X, got q={q}, X={x}")));
    }
    if opts.degree == 0 {
        return Err(Error::Domain("phase degree must be at least 1".into()));
    }
    if x > table.upper_bound() {
        return Err(Error::Coverage(format!("X = {x} exceeds table bound {}", table.upper_bound())));
    }
    let residues: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
    let per = opts.max_evals / residues.len() as f64;
    let mut best: Option<SupResult> = None;
    let mut exhausted = false;
    for a in residues {
        let (phase, value, ex) = sup_for_residue(table, q, a, x, opts, per);
        exhausted |= ex;
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(SupResult {
                a,
                phase,
                value,
                budget_exhausted: false,
            });
        }
    }
    let mut best = best.expect("at least one reduced residue");
    best.budget_exhausted = exhausted;
    Ok(best)
}
