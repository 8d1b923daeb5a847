//! Direct enumeration of every parallelepiped `{n + ω·h : ω ∈ {0,1}^k}`
//! inside the support. Independent of the FFT route; used as the oracle.

use num_complex::Complex64;

/// Vertex offsets `ω·h` and conjugation parity `|ω| mod 2`.
fn vertices(h: &[i64]) -> Vec<(i64, bool)> {
    let k = h.len();
    (0..1usize << k)
        .map(|mask| {
            let off = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| h[i]).sum();
            (off, mask.count_ones() % 2 == 1)
        })
        .collect()
}

/// `Σ_{n, h ∈ Z^k} Π_ω C^{|ω|} f(n + ω·h)` over configurations with every
/// vertex in `[0, len)`.
pub(crate) fn config_sum(f: &[Complex64], k: u32) -> f64 {
    let y = f.len() as i64 - 1;
    let mut h = vec![0i64; k as usize];
    let mut total = Complex64::new(0.0, 0.0);
    let fc: Vec<Complex64> = f.iter().map(|v| v.conj()).collect();
    enumerate([f, &fc], y, &mut h, 0, 0, 0, &mut total);
    total.re
}

fn enumerate(
    f: [&[Complex64]; 2],
    y: i64,
    h: &mut [i64],
    depth: usize,
    lo: i64,
    hi: i64,
    total: &mut Complex64,
) {
    if depth == h.len() {
        let verts = vertices(h);
        for n in -lo..=y - hi {
            let mut prod = Complex64::new(1.0, 0.0);
            for &(off, conj) in &verts {
                prod *= f[conj as usize][(n + off) as usize];
            }
            *total += prod;
        }
        return;
    }
    let room = y - (hi - lo);
    for step in -room..=room {
        h[depth] = step;
        let (nlo, nhi) = (lo + step.min(0), hi + step.max(0));
        enumerate(f, y, h, depth + 1, nlo, nhi, total);
    }
}

/// Same sum on the cyclic group `Z_N` (no support restriction, indices
/// wrap), by enumerating all `N^{k+1}` tuples.
pub(crate) fn cyclic_config_sum(f: &[Complex64], k: u32) -> f64 {
    let n = f.len() as i64;
    let k = k as usize;
    let mut total = Complex64::new(0.0, 0.0);
    let tuples = (n as u64).pow(k as u32);
    let mut h = vec![0i64; k];
    for t in 0..tuples {
        let mut rest = t;
        for hi in h.iter_mut() {
            *hi = (rest % n as u64) as i64;
            rest /= n as u64;
        }
        let verts = vertices(&h);
        for x in 0..n {
            let mut prod = Complex64::new(1.0, 0.0);
            for &(off, conj) in &verts {
                let v = f[((x + off) % n) as usize];
                prod *= if conj { v.conj() } else { v };
            }
            total += prod;
        }
    }
    total.re
}
