//! Average size of `‖f(q·+a)‖_{U^k(X/q)}` over a dyadic window of moduli.

use crate::arithfn::ArithTable;
use crate::error::{Error, Result};
use crate::gowers::{gowers_norm_in_progression, Strategy};
use crate::numeric::gcd;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub x: u64,
    pub q_base: u64,
    pub moduli: usize,
    /// Mean over `q ∈ [Q, 2Q)` of `max_{(a,q)=1} ‖f(q·+a)‖_{U^k}`.
    pub mean: f64,
    pub max: f64,
    /// Fraction of moduli whose value is at least `ε`.
    pub exceptional_fraction: f64,
    /// `log log X / log(X/Q²)`.
    pub envelope: f64,
}

pub fn envelope(x: u64, q_base: u64) -> f64 {
    let x = x as f64;
    x.ln().ln() / (x / (q_base as f64).powi(2)).ln()
}

/// One row per `X`, with `Q = ⌊X^θ⌋`. For `k = 1` the value is the largest
/// `|mean of f|` over reduced progressions.
pub fn decay_table(table: &ArithTable, k: u32, x_grid: &[u64], theta: f64, epsilon: f64) -> Result<Vec<DecayRow>> {
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let q_base = (x as f64).powf(theta).floor() as u64;
        if q_base == 0 || (q_base as u128).pow(2) > x as u128 {
            return Err(Error::Hypothesis {
                constraint: "Q² ≤ X",
                context: format!("Q = {q_base}, X = {x}"),
            });
        }
        let strategy = if k == 1 { Strategy::U1Mean } else { Strategy::Auto };
        let values: Vec<Result<f64>> = (q_base..2 * q_base)
            .into_par_iter()
            .map(|q| {
                let mut best = 0.0f64;
                for a in (0..q).filter(|&a| gcd(a, q) == 1) {
                    let r = gowers_norm_in_progression(table, q, a, x, k, strategy)?;
                    best = best.max(r.norm);
                }
                Ok(best)
            })
            .collect();
        let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
        let n = values.len() as f64;
        out.push(DecayRow {
            x,
            q_base,
            moduli: values.len(),
            mean: values.iter().sum::<f64>() / n,
            max: values.iter().copied().fold(0.0, f64::max),
            exceptional_fraction: values.iter().filter(|&&v| v >= epsilon).count() as f64 / n,
            envelope: envelope(x, q_base),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithfn::unit_table;

    #[test]
    fn unit_rows_are_one() {
        let t = unit_table(100_000).unwrap();
        for k in [1, 2] {
            for r in decay_table(&t, k, &[10_000, 100_000], 0.4, 0.5).unwrap() {
                assert!((r.mean - 1.0).abs() < 1e-12);
                assert_eq!(r.exceptional_fraction, 1.0);
            }
        }
    }

    #[test]
    fn envelope_closed_form() {
        let q = (1e6f64).powf(0.4).floor() as u64;
        assert_eq!(q, 251);
        let want = (1e6f64).ln().ln() / (1e6 / 251.0f64.powi(2)).ln();
        assert_eq!(envelope(1_000_000, 251), want);
    }

    #[test]
    fn gate() {
        let t = unit_table(100).unwrap();
        assert!(matches!(decay_table(&t, 1, &[100], 0.6, 0.5), Err(Error::Hypothesis { .. })));
    }
}
