use super::{fixed, PolyPhase};

/// Best simultaneous denominator for the coefficients of a phase.
#[derive(Clone, Debug, PartialEq)]
pub struct DioApprox {
    /// Minimizing denominator `r ≥ 1`.
    pub r: u64,
    /// `max_i N^i · ‖r α_i‖`.
    pub residual: f64,
    /// Range length `N` the residual is measured over.
    pub n_range: f64,
    /// Degree-1 phases only: largest continued-fraction denominator `≤ r_max`.
    pub convergent_denominator: Option<u64>,
}

impl DioApprox {
    /// For linear phases, whether the exhaustive minimizer agrees with the
    /// continued-fraction prediction.
    pub fn convergent_agrees(&self) -> Option<bool> {
        self.convergent_denominator.map(|q| q == self.r)
    }
}

fn residual_for(phi: &PolyPhase, n_range: f64, r: u64) -> f64 {
    let c = phi.fixed_coeffs();
    let mut worst = 0.0f64;
    let mut scale = 1.0;
    for &a in &c[1..] {
        scale *= n_range;
        worst = worst.max(scale * fixed::dist_to_int(a.wrapping_mul(r as u128)));
    }
    worst
}

/// `max_{1≤i≤s} N^i · ‖α_i‖`.
pub fn smoothness_norm(phi: &PolyPhase, n_range: f64) -> f64 {
    residual_for(phi, n_range, 1)
}

/// Exhaustive search for `r ∈ [1, r_max]` minimizing `max_i N^i ‖r α_i‖`;
/// ties go to the smallest `r`.
pub fn best_denominator(phi: &PolyPhase, n_range: f64, r_max: u64) -> DioApprox {
    assert!(r_max >= 1, "r_max must be positive");
    let mut best_r = 1;
    let mut best = residual_for(phi, n_range, 1);
    for r in 2..=r_max {
        let v = residual_for(phi, n_range, r);
        if v < best {
            best = v;
            best_r = r;
        }
    }
    let convergent_denominator = (phi.degree() == 1).then(|| {
        convergent_denominators(phi.fixed_coeffs()[1], r_max)
            .last()
            .copied()
            .unwrap_or(1)
    });
    DioApprox {
        r: best_r,
        residual: best,
        n_range,
        convergent_denominator,
    }
}

/// Continued-fraction convergent denominators `q_0 = 1 < q_1 < …` of the
/// exact rational `a / 2^128`, stopping before the first one above `q_max`.
pub fn convergent_denominators(a: u128, q_max: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    if a == 0 {
        return out;
    }
    // First step of Euclid on (2^128, a), done without representing 2^128.
    let mut quot = u128::MAX / a;
    let mut rem = u128::MAX - quot * a + 1;
    if rem == a {
        quot += 1;
        rem = 0;
    }
    // a / 2^128 = [0; quot, ...]: denominators q_{-1} = 0, q_0 = 1.
    let (mut q_prev, mut q_cur): (u128, u128) = (1, quot);
    if q_cur > q_max as u128 {
        return out;
    }
    out.push(q_cur as u64);
    let (mut num, mut den) = (a, rem);
    while den != 0 {
        let t = num / den;
        (num, den) = (den, num % den);
        let next = match t.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)) {
            Some(v) if v <= q_max as u128 => v,
            _ => break,
        };
        q_prev = q_cur;
        q_cur = next;
        out.push(q_cur as u64);
    }
    out
}
