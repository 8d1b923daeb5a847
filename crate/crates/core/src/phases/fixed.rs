//! Reals mod 1 as `u128` fixed point: `x ↦ round(frac(x) · 2^128)`.
//! Integer multiples and integer polynomial evaluation are then exact under
//! wrapping arithmetic.

use num_complex::Complex64;
use std::f64::consts::TAU;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;
const TWO_POW_M128: f64 = 1.0 / (TWO_POW_64 * TWO_POW_64);

/// Fixed-point representation of `x mod 1`. Exact for every finite `f64`
/// whose fractional part is at least `2^-75`.
pub fn from_f64(x: f64) -> u128 {
    assert!(x.is_finite(), "phase coefficient must be finite");
    let frac = x - x.floor();
    if frac == 0.0 || frac >= 1.0 {
        return 0;
    }
    let bits = frac.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (mant, e) = if exp == 0 {
        (bits & ((1 << 52) - 1), -1074i64)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
    };
    // frac = mant · 2^e with frac < 1, so the shifted value is below 2^128.
    let shift = 128 + e;
    if shift >= 0 {
        (mant as u128) << shift
    } else if shift > -64 {
        let s = (-shift) as u32;
        ((mant as u128) + (1u128 << (s - 1))) >> s
    } else {
        0
    }
}

/// `frac(c / d)` in fixed point, rounded to nearest.
pub fn from_ratio(c: i64, d: u64) -> u128 {
    assert!(d > 0, "denominator must be positive");
    let d128 = d as u128;
    let x = (c as i128).rem_euclid(d as i128) as u128;
    let hi = (x << 64) / d128;
    let rem = (x << 64) % d128;
    let lo = (rem << 64) / d128;
    let rem2 = (rem << 64) % d128;
    let v = (hi << 64) | lo;
    if rem2 * 2 >= d128 {
        v.wrapping_add(1)
    } else {
        v
    }
}

/// Value in `[0, 1)`.
pub fn to_f64(x: u128) -> f64 {
    ((x >> 64) as u64 as f64 + (x as u64 as f64) / TWO_POW_64) / TWO_POW_64
}

/// Representative in `[-1/2, 1/2)`.
#[inline]
pub fn to_centered(x: u128) -> f64 {
    (x as i128) as f64 * TWO_POW_M128
}

/// Distance to the nearest integer, `‖x‖`.
#[inline]
pub fn dist_to_int(x: u128) -> f64 {
    (x as i128).unsigned_abs() as f64 * TWO_POW_M128
}

/// `e(x)` for a fixed-point phase.
#[inline]
pub fn cis(x: u128) -> Complex64 {
    let (s, c) = (TAU * to_centered(x)).sin_cos();
    Complex64::new(c, s)
}

/// Two's-complement embedding of a signed integer, for wrapping products.
#[inline]
pub fn int(m: i128) -> u128 {
    m as u128
}
