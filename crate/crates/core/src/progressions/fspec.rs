//! The multi-modulus function `F(n) = Σ_q 1[n ∈ I_q, n ≡ a_q (q)] ψ_q((n − a_q)/q)`.

use super::ProgressionSpec;
use crate::error::{Error, Result};
use crate::gowers::ComplexSeq;
use crate::numeric::gcd;
use crate::phases::PolyPhase;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct FSpec {
    entries: Vec<(ProgressionSpec, PolyPhase)>,
    q_base: u64,
    x: u64,
    t: f64,
}

fn normalization(entries: &[(ProgressionSpec, PolyPhase)]) -> f64 {
    entries
        .iter()
        .map(|(p, _)| (p.hi - p.lo) as f64 / p.q as f64 + 1.0)
        .sum()
}

impl FSpec {
    /// Moduli must be distinct and lie in `[Q, 2Q)`; intervals must lie in `[0, X]`.
    pub fn new(q_base: u64, x: u64, entries: Vec<(ProgressionSpec, PolyPhase)>) -> Result<Self> {
        if q_base == 0 {
            return Err(Error::Domain("Q must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (p, _) in &entries {
            if p.q < q_base || p.q >= 2 * q_base {
                return Err(Error::Domain(format!(
                    "modulus {} outside [{q_base}, {})",
                    p.q,
                    2 * q_base
                )));
            }
            if p.hi > x {
                return Err(Error::Domain(format!("interval end {} exceeds X = {x}", p.hi)));
            }
            if !seen.insert(p.q) {
                return Err(Error::Domain(format!("modulus {} listed twice", p.q)));
            }
        }
        let t = normalization(&entries);
        Ok(FSpec {
            entries,
            q_base,
            x,
            t,
        })
    }

    pub fn empty(q_base: u64, x: u64) -> Self {
        FSpec {
            entries: Vec::new(),
            q_base,
            x,
            t: 0.0,
        }
    }

    /// `count` distinct random moduli in `[Q, 2Q)`, random reduced residues,
    /// random subintervals of `[0, X]` and random phases of degree `s`.
    pub fn random(seed: u64, q_base: u64, x: u64, count: usize, s: usize) -> Result<Self> {
        if count as u64 > q_base {
            return Err(Error::Domain(format!("cannot pick {count} moduli from [{q_base}, {})", 2 * q_base)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut moduli: Vec<u64> = (q_base..2 * q_base).collect();
        for i in 0..count {
            let j = rng.gen_range(i..moduli.len());
            moduli.swap(i, j);
        }
        moduli.truncate(count);
        moduli.sort_unstable();
        let mut entries = Vec::with_capacity(count);
        for q in moduli {
            let a = loop {
                let a = rng.gen_range(0..q);
                if gcd(a, q) == 1 {
                    break a;
                }
            };
            let u = rng.gen_range(0..=x);
            let v = rng.gen_range(0..=x);
            let p = ProgressionSpec::new(q, a, u.min(v), u.max(v))?;
            let alphas: Vec<f64> = (0..s).map(|_| rng.gen::<f64>()).collect();
            entries.push((p, PolyPhase::new(&alphas)?));
        }
        FSpec::new(q_base, x, entries)
    }

    /// Reads the text format
    ///
    /// ```text
    /// Q = 100
    /// X = 100000
    /// prog = q a lo hi alpha_0 alpha_1 [alpha_2 ...]
    /// ```
    ///
    /// with one `prog` line per modulus; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut q_base = None;
        let mut x = None;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Config(format!("fspec line {}: {m}", i + 1));
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let v = v.trim();
            match k.trim() {
                "Q" => q_base = Some(crate::harness::parse_u64("Q", v)?),
                "X" => x = Some(crate::harness::parse_u64("X", v)?),
                "prog" => {
                    let f: Vec<&str> = v.split_whitespace().collect();
                    if f.len() < 6 {
                        return Err(bad("expected `prog = q a lo hi alpha_0 alpha_1 ...`"));
                    }
                    let ints: Vec<u64> = f[..4]
                        .iter()
                        .map(|t| crate::harness::parse_u64("prog", t))
                        .collect::<Result<_>>()?;
                    let reals: Vec<f64> = f[4..]
                        .iter()
                        .map(|t| t.parse::<f64>().map_err(|_| bad("bad coefficient")))
                        .collect::<Result<_>>()?;
                    let p = ProgressionSpec::new(ints[0], ints[1], ints[2], ints[3])?;
                    entries.push((p, PolyPhase::with_constant(reals[0], &reals[1..])?));
                }
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let q_base = q_base.ok_or_else(|| Error::Config("fspec: missing `Q`".into()))?;
        let x = x.ok_or_else(|| Error::Config("fspec: missing `X`".into()))?;
        FSpec::new(q_base, x, entries)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Inverse of [`FSpec::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("Q = {}\nX = {}\n", self.q_base, self.x);
        for (p, phi) in &self.entries {
            s.push_str(&format!("prog = {} {} {} {}", p.q, p.a, p.lo, p.hi));
            for i in 0..=phi.degree() {
                s.push_str(&format!(" {:e}", phi.alpha(i)));
            }
            s.push('\n');
        }
        s
    }

    pub fn entries(&self) -> &[(ProgressionSpec, PolyPhase)] {
        &self.entries
    }

    pub fn q_base(&self) -> u64 {
        self.q_base
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    /// `T = Σ_q (|I_q|/q + 1)`.
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn recompute_t(&self) -> f64 {
        normalization(&self.entries)
    }
}

/// `F(n)` by summing over the progressions that contain `n`.
pub fn eval_f(spec: &FSpec, n: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, phi) in &spec.entries {
        if p.contains(n) {
            acc += phi.value(((n - p.a) / p.q) as i128);
        }
    }
    acc
}

/// `F` on `[0, X]`, built progression by progression.
pub fn tabulate_f(spec: &FSpec) -> ComplexSeq {
    tabulate_f_to(spec, spec.x)
}

/// `F` on `[0, bound]`; zero past `X`.
pub fn tabulate_f_to(spec: &FSpec, bound: u64) -> ComplexSeq {
    let mut v = vec![Complex64::new(0.0, 0.0); bound as usize + 1];
    for (p, phi) in &spec.entries {
        for n in p.terms() {
            if n > bound {
                break;
            }
            v[n as usize] += phi.value(((n - p.a) / p.q) as i128);
        }
    }
    ComplexSeq::from_values_unchecked(v, false)
}

/// `Σ_{1 ≤ n ≤ X, D | n} |F(n)|`.
pub fn divisible_mass(f: &ComplexSeq, d: u64) -> f64 {
    assert!(d >= 1);
    let v = f.values();
    let mut s = 0.0;
    let mut n = d as usize;
    while n < v.len() {
        s += v[n].norm();
        n += d as usize;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_is_zero() {
        let s = FSpec::empty(10, 500);
        let f = tabulate_f(&s);
        assert!(f.values().iter().all(|z| z.norm() == 0.0));
        assert_eq!(eval_f(&s, 17), Complex64::new(0.0, 0.0));
        assert_eq!(s.t(), 0.0);
    }

    #[test]
    fn single_progression_indicator() {
        let p = ProgressionSpec::new(7, 3, 20, 300).unwrap();
        let s = FSpec::new(5, 400, vec![(p, PolyPhase::zero(1))]).unwrap();
        let f = tabulate_f(&s);
        for n in 0..=400u64 {
            let want = if (20..=300).contains(&n) && n % 7 == 3 { 1.0 } else { 0.0 };
            assert_eq!(f.values()[n as usize], Complex64::new(want, 0.0), "n={n}");
        }
        assert_eq!(s.t(), 280.0 / 7.0 + 1.0);
    }

    #[test]
    fn tabulation_matches_pointwise() {
        let s = FSpec::random(11, 100, 100_000, 10, 2).unwrap();
        let f = tabulate_f(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let n = rng.gen_range(0..=100_000u64);
            assert!((f.values()[n as usize] - eval_f(&s, n)).norm() <= 1e-12);
        }
        assert_eq!(s.t(), s.recompute_t());
    }

    #[test]
    fn text_round_trip() {
        let s = FSpec::random(4, 50, 20_000, 5, 2).unwrap();
        let back = FSpec::parse(&s.to_text()).unwrap();
        assert_eq!(back.entries().len(), 5);
        let (f, g) = (tabulate_f(&s), tabulate_f(&back));
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(FSpec::parse("Q = 5\nprog = 5 1 0 10 0 0.5").is_err());
        assert!(FSpec::parse("Q = 5\nX = 100\nprog = 5 1 0 10 0").is_err());
    }

    #[test]
    fn validation() {
        let p = ProgressionSpec::new(30, 1, 0, 100).unwrap();
        assert!(FSpec::new(10, 1000, vec![(p.clone(), PolyPhase::zero(1))]).is_err());
        assert!(FSpec::new(20, 50, vec![(p.clone(), PolyPhase::zero(1))]).is_err());
        let two = vec![(p.clone(), PolyPhase::zero(1)), (p, PolyPhase::zero(1))];
        assert!(FSpec::new(20, 1000, two).is_err());
    }
}
