use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Forward transforms keyed by length, shared across worker threads.
#[derive(Default)]
pub(crate) struct FftCache {
    plans: Mutex<HashMap<usize, Arc<dyn Fft<f64>>>>,
}

impl FftCache {
    pub fn plan(&self, len: usize) -> Arc<dyn Fft<f64>> {
        let mut plans = self.plans.lock().expect("fft plan cache poisoned");
        plans
            .entry(len)
            .or_insert_with(|| FftPlanner::new().plan_fft_forward(len))
            .clone()
    }

    /// `Σ_{h ∈ Z} |Σ_n g(n+h) conj(g(n))|²` for a finitely supported `g`,
    /// via `(1/M) Σ_ξ |ĝ(ξ)|^4` with zero padding to a power of two
    /// `M ≥ 2·len`. This is the unnormalized `U²` configuration sum.
    pub fn fourth_moment(&self, g: &[Complex64]) -> f64 {
        if g.is_empty() {
            return 0.0;
        }
        let m = (2 * g.len()).next_power_of_two();
        self.fourth_moment_cyclic_padded(g, m)
    }

    /// Same sum over the cyclic group of order `m` (wraparound included),
    /// with `g` zero-padded to length `m`.
    pub fn fourth_moment_cyclic_padded(&self, g: &[Complex64], m: usize) -> f64 {
        assert!(g.len() <= m);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..g.len()].copy_from_slice(g);
        self.plan(m).process(&mut buf);
        let terms: Vec<f64> = buf.iter().map(|z| z.norm_sqr() * z.norm_sqr()).collect();
        crate::numeric::pairwise_sum(&terms) / m as f64
    }
}
