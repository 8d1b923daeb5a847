//! Torus polynomial phases `n ↦ e(α_s n^s + ⋯ + α_1 n + α_0)`, their Weyl
//! sums, and diophantine diagnostics.

mod diophantine;
mod equidist;
pub mod fixed;

pub use diophantine::{
    best_denominator, convergent_denominators, smoothness_norm, DioApprox,
};
pub use equidist::{equidist_defect, EquidistOptions, EquidistReport, Witness};

use crate::error::{Error, Result};
use crate::gowers::ComplexSeq;
use crate::numeric::CompensatedSum;
use num_complex::Complex64;

/// A polynomial phase with coefficients held mod 1 in `u128` fixed point.
/// `coeffs[0]` is the constant term, `coeffs[i]` multiplies `n^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyPhase {
    coeffs: Vec<u128>,
}

impl PolyPhase {
    /// Phase with `α_1..α_s` given and no constant term.
    pub fn new(alphas: &[f64]) -> Result<Self> {
        Self::with_constant(0.0, alphas)
    }

    pub fn with_constant(alpha0: f64, alphas: &[f64]) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Domain("phase degree must be at least 1".into()));
        }
        if !alpha0.is_finite() || alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("phase coefficients must be finite".into()));
        }
        let mut coeffs = Vec::with_capacity(alphas.len() + 1);
        coeffs.push(fixed::from_f64(alpha0));
        coeffs.extend(alphas.iter().map(|&a| fixed::from_f64(a)));
        Ok(PolyPhase { coeffs })
    }

    /// Zero phase of degree `s`.
    pub fn zero(s: usize) -> Self {
        assert!(s >= 1);
        PolyPhase {
            coeffs: vec![0; s + 1],
        }
    }

    /// From fixed-point coefficients `[α_0, α_1, …, α_s]`.
    pub fn from_fixed(coeffs: Vec<u128>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Domain("phase degree must be at least 1".into()));
        }
        Ok(PolyPhase { coeffs })
    }

    /// From rationals `α_i = num_i / den_i`, `i = 1..=s`.
    pub fn from_ratios(ratios: &[(i64, u64)]) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::Domain("phase degree must be at least 1".into()));
        }
        let mut coeffs = vec![0u128];
        coeffs.extend(ratios.iter().map(|&(c, d)| fixed::from_ratio(c, d)));
        Ok(PolyPhase { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn fixed_coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    /// `α_i` as a real in `[0, 1)`; `i = 0` is the constant term.
    pub fn alpha(&self, i: usize) -> f64 {
        fixed::to_f64(self.coeffs[i])
    }

    pub fn alphas(&self) -> Vec<f64> {
        (1..=self.degree()).map(|i| self.alpha(i)).collect()
    }

    pub fn set_alpha(&mut self, i: usize, a: f64) {
        self.coeffs[i] = fixed::from_f64(a);
    }

    pub fn set_fixed(&mut self, i: usize, a: u128) {
        self.coeffs[i] = a;
    }

    /// `φ(n) mod 1` in fixed point, exact for every integer `n`.
    #[inline]
    pub fn eval_fixed(&self, n: i128) -> u128 {
        let x = n as u128;
        let mut acc = 0u128;
        for &c in self.coeffs.iter().rev() {
            acc = acc.wrapping_mul(x).wrapping_add(c);
        }
        acc
    }

    #[inline]
    pub fn value(&self, n: i128) -> Complex64 {
        fixed::cis(self.eval_fixed(n))
    }

    /// The phase `m·φ`.
    pub fn scaled(&self, m: i64) -> PolyPhase {
        let mm = fixed::int(m as i128);
        PolyPhase {
            coeffs: self.coeffs.iter().map(|c| c.wrapping_mul(mm)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// `e(φ(n))` for `0 ≤ n < N`.
pub fn eval_phase(phi: &PolyPhase, n: usize) -> ComplexSeq {
    let values = (0..n as i128).map(|i| phi.value(i)).collect();
    ComplexSeq::from_values_unchecked(values, true)
}

/// `(1/len) Σ_{j<len} e(m·φ(start + j·step))`.
pub fn weyl_sum(phi: &PolyPhase, start: i64, step: i64, length: u64, m: i64) -> Complex64 {
    assert!(length >= 1, "weyl_sum needs a nonempty progression");
    let scaled = phi.scaled(m);
    let acc: CompensatedSum = (0..length as i128)
        .map(|j| scaled.value(start as i128 + j * step as i128))
        .collect();
    acc.value() / length as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::e;

    #[test]
    fn zero_phase_is_constant_one() {
        let s = eval_phase(&PolyPhase::zero(3), 20);
        assert!(s.values().iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn half_alternates() {
        let phi = PolyPhase::new(&[0.5]).unwrap();
        let s = eval_phase(&phi, 10);
        for (n, z) in s.values().iter().enumerate() {
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((z.re - want).abs() < 1e-15 && z.im.abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_quarter_matches_direct_evaluation() {
        let phi = PolyPhase::new(&[0.0, 0.25]).unwrap();
        let s = eval_phase(&phi, 8);
        for n in 0..8u64 {
            // n^2/4 mod 1 is 0 or 1/4 exactly
            let direct = e(((n * n) % 4) as f64 / 4.0);
            assert!((s.values()[n as usize] - direct).norm() < 1e-15);
        }
        let pattern: Vec<_> = s.values().iter().map(|z| (z.re.round(), z.im.round())).collect();
        assert_eq!(pattern[0], (1.0, 0.0));
        assert_eq!(pattern[1], (0.0, 1.0));
        assert_eq!(pattern[2], (1.0, 0.0));
        assert_eq!(pattern[3], (0.0, 1.0));
    }

    #[test]
    fn large_arguments_stay_exact() {
        // α = 1/2^20 exactly; n = 10^9, n^2 α mod 1 computed in integers.
        let phi = PolyPhase::new(&[0.0, 1.0 / (1u64 << 20) as f64]).unwrap();
        let n: u128 = 1_000_000_000;
        let exact = ((n * n) % (1 << 20)) as f64 / (1u64 << 20) as f64;
        assert!((fixed::to_f64(phi.eval_fixed(n as i128)) - exact).abs() < 1e-15);
    }

    #[test]
    fn weyl_sum_examples() {
        assert_eq!(weyl_sum(&PolyPhase::zero(1), 0, 1, 50, 1), Complex64::new(1.0, 0.0));
        let golden = PolyPhase::new(&[0.6180339887]).unwrap();
        assert!(weyl_sum(&golden, 0, 1, 10_000, 1).norm() <= 0.02);
        let third = PolyPhase::new(&[1.0 / 3.0]).unwrap();
        assert!((weyl_sum(&third, 2, 3, 500, 1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weyl_sum_geometric_bound() {
        // |Σ e(jθ)| ≤ 1 / (2‖θ‖) for a linear phase.
        let a = 0.6180339887f64;
        let bound = 1.0 / (10_000.0 * 2.0 * (a - a.round()).abs());
        assert!(weyl_sum(&PolyPhase::new(&[a]).unwrap(), 0, 1, 10_000, 1).norm() <= bound);
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(PolyPhase::new(&[]).is_err());
        assert!(PolyPhase::from_fixed(vec![0]).is_err());
    }
}
