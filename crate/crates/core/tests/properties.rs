use gpat_core::arithfn::{sieve_liouville, sieve_mobius, sieve_spf};
use gpat_core::bilinear::{composed_phase, congruence_merge, lcm_stats};
use gpat_core::gowers::{
    cyclic_gowers_norm, gowers_norm, interval_norm_in_group, multiplicative_derivative, ComplexSeq, Strategy as Method,
};
use gpat_core::numeric::gcd;
use gpat_core::phases::{best_denominator, eval_phase, smoothness_norm, PolyPhase};
use gpat_core::progressions::{
    eval_f, exceptional_scan, residue_sums, sup_correlation, tabulate_f, FSpec, PhaseSource, ScanOptions,
    SupOptions,
};
use gpat_core::ramare::{decompose, g_table, MultSpec};
use gpat_core::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;
use std::sync::OnceLock;

fn mu() -> &'static gpat_core::ArithTable {
    static T: OnceLock<gpat_core::ArithTable> = OnceLock::new();
    T.get_or_init(|| sieve_mobius(100_000).unwrap())
}

fn liouville() -> &'static gpat_core::ArithTable {
    static T: OnceLock<gpat_core::ArithTable> = OnceLock::new();
    T.get_or_init(|| sieve_liouville(100_000).unwrap())
}

fn disc() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(r, t)| Complex64::from_polar(r.sqrt(), TAU * t))
}

fn seq(max_len: usize) -> impl Strategy<Value = ComplexSeq> {
    prop::collection::vec(disc(), 1..=max_len).prop_map(|v| ComplexSeq::new(v).unwrap())
}

fn norm(f: &ComplexSeq, k: u32) -> f64 {
    gowers_norm(f, k, Method::Auto).unwrap().norm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_matches_its_parts(f in seq(60), k in 1u32..=3) {
        let r = gowers_norm(&f, k, Method::Auto).unwrap();
        prop_assert!(r.norm >= 0.0 && r.norm <= 1.0 + 1e-12);
        let again = (r.raw_numerator / r.normalizer).powf(1.0 / (1u32 << k) as f64);
        prop_assert!((again - r.norm).abs() <= 1e-12 * (1.0 + r.norm));
        prop_assert_eq!(r.group_order, (1u64 << k) * f.len() as u64);
    }

    #[test]
    fn conjugation_and_reflection(f in seq(50), k in 1u32..=3) {
        let conj = ComplexSeq::new(f.values().iter().map(|v| v.conj()).collect()).unwrap();
        let rev = ComplexSeq::new(f.values().iter().rev().copied().collect()).unwrap();
        let base = norm(&f, k);
        prop_assert!((norm(&conj, k) - base).abs() <= 1e-9);
        prop_assert!((norm(&rev, k) - base).abs() <= 1e-9);
    }

    #[test]
    fn phase_invariance(f in seq(50), k in 2u32..=3, a0 in 0.0..1.0f64, a1 in 0.0..1.0f64, a2 in 0.0..1.0f64) {
        let coeffs: Vec<f64> = [a1, a2][..(k - 1) as usize].to_vec();
        let p = PolyPhase::with_constant(a0, &coeffs).unwrap();
        let g = ComplexSeq::new(f.values().iter().enumerate().map(|(n, v)| v * p.value(n as i128)).collect()).unwrap();
        prop_assert!((norm(&f, k) - norm(&g, k)).abs() <= 1e-9);
    }

    #[test]
    fn cyclic_monotone_in_k(v in prop::collection::vec(disc(), 1..=64), k in 1u32..=3) {
        let lo = cyclic_gowers_norm(&v, k).unwrap();
        let hi = cyclic_gowers_norm(&v, k + 1).unwrap();
        prop_assert!(lo <= hi + 1e-9, "{lo} > {hi}");
    }

    #[test]
    fn embedding_independent(f in seq(20), k in 1u32..=3, extra in 0usize..40) {
        let n = (1usize << k) * f.len() + extra;
        prop_assert!((interval_norm_in_group(&f, k, n).unwrap() - norm(&f, k)).abs() <= 1e-12);
    }

    #[test]
    fn derivative_at_zero_is_modulus_squared(f in seq(40)) {
        let g = multiplicative_derivative(&f, 0);
        for (a, b) in f.values().iter().zip(g.values()) {
            prop_assert!((a.norm_sqr() - b.re).abs() <= 1e-15 && b.im.abs() <= 1e-15);
        }
    }

    #[test]
    fn multiplicativity(m in 1u64..300, n in 1u64..300) {
        let (mu, la) = (mu(), liouville());
        prop_assert_eq!(la.get(m * n), la.get(m) * la.get(n));
        if gcd(m, n) == 1 {
            prop_assert_eq!(mu.get(m * n), mu.get(m) * mu.get(n));
        }
    }

    #[test]
    fn phase_values_unit_and_composable(
        alphas in prop::collection::vec(0.0..1.0f64, 1..=3),
        scale in 1u64..50,
        shift in 0u64..1000,
    ) {
        let p = PolyPhase::new(&alphas).unwrap();
        let vals = eval_phase(&p, 2_000);
        prop_assert!(vals.values().iter().all(|z| (z.norm() - 1.0).abs() <= 1e-12));
        let c = composed_phase(&p, scale, shift);
        for m in (0..10_000i128).step_by(97) {
            let direct = p.value(scale as i128 * m + shift as i128);
            prop_assert!((direct - c.value(m)).norm() <= 1e-10);
        }
        for m in 0..(2_000 - shift.min(1_999)) / scale {
            let idx = (shift + scale * m) as usize;
            if idx < 2_000 {
                prop_assert!((vals.values()[idx] - c.value(m as i128)).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn r_max_one_is_smoothness(alphas in prop::collection::vec(0.0..1.0f64, 1..=3), n in 1.0..1e4f64) {
        let p = PolyPhase::new(&alphas).unwrap();
        let d = best_denominator(&p, n, 1);
        prop_assert_eq!(d.r, 1);
        prop_assert_eq!(d.residual, smoothness_norm(&p, n));
    }

    #[test]
    fn lower_degree_phases_have_unit_norm(alphas in prop::collection::vec(0.0..1.0f64, 1..=2), y in 5usize..80) {
        let k = alphas.len() as u32 + 1;
        let f = eval_phase(&PolyPhase::new(&alphas).unwrap(), y + 1);
        prop_assert!((norm(&f, k) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn residues_partition_the_sum(q in 1u64..60, x in 1u64..5_000) {
        let t = mu();
        let sums = residue_sums(t, q, x).unwrap();
        let total: f64 = (1..=x).map(|n| t.get(n).re).sum();
        prop_assert_eq!(sums.iter().map(|z| z.re).sum::<f64>(), total);
    }

    #[test]
    fn eval_and_tabulate_agree(seed in 0u64..1_000, count in 1usize..8, s in 1usize..4) {
        let spec = FSpec::random(seed, 10, 5_000, count, s).unwrap();
        let tab = tabulate_f(&spec);
        for n in (0..=5_000u64).step_by(37) {
            prop_assert!((tab.values()[n as usize] - eval_f(&spec, n)).norm() <= 1e-12);
        }
        prop_assert!(spec.entries().iter().all(|(p, _)| p.q >= 10 && p.q < 20 && gcd(p.a, p.q) == 1 && p.hi <= 5_000));
        prop_assert_eq!(spec.t(), spec.recompute_t());
    }

    #[test]
    fn g_of_random_specs(seed in 0u64..10_000) {
        let f = MultSpec::random_unit_disc(seed);
        let (fp, g) = decompose(&f, 12);
        let spf = sieve_spf(200).unwrap();
        for &p in spf.primes() {
            let p = p as u64;
            prop_assert!(g.value(p, 1).norm() <= 1e-15);
            for k in 2..=12 {
                if (p as f64).powi(k as i32) > 1e15 { break; }
                prop_assert!(g.value(p, k).norm() <= 2.0 + 1e-12);
                prop_assert!((fp.value(p, k) - fp.value(p, 1).powu(k)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn merge_substitutes(k in 1u64..10_000, kp in 1u64..10_000, q in 1u64..5_000, qp in 1u64..5_000, a in 0u64..5_000, ap in 0u64..5_000) {
        let (a, ap) = (a % q, ap % qp);
        if let Some((m, r)) = congruence_merge(k, kp, q, qp, a, ap) {
            prop_assert!(r < m);
            prop_assert_eq!((k as u128 * r as u128 % q as u128) as u64, a);
            prop_assert_eq!((kp as u128 * r as u128 % qp as u128) as u64, ap);
        }
    }

    #[test]
    fn lcm_invariants(q_base in 2u64..60, r_frac in 0.0..1.0f64) {
        let lo = q_base as f64;
        let hi = 4.0 * lo * lo;
        let r = (lo + r_frac * (hi - lo)) as u64;
        let st = lcm_stats(q_base, r).unwrap();
        prop_assert!(st.violations().is_empty());
        for (i, row) in st.multiplicities.iter().enumerate() {
            prop_assert_eq!(row.iter().map(|&(_, m)| m as u64).sum::<u64>(), st.degrees[i]);
            prop_assert!(row.iter().all(|&(l, _)| l >= r && l < 2 * r));
        }
        prop_assert_eq!(st.histogram.values().sum::<u64>(), st.pair_count());
    }
}

#[test]
fn mobius_g_lives_on_squarefull_numbers() {
    let (_, g) = decompose(&MultSpec::mobius(), 20);
    let gv = g_table(&g, 100_000).unwrap();
    let spf = sieve_spf(100_000).unwrap();
    for n in 2..=100_000u64 {
        if gv[n as usize].norm() > 0.0 {
            assert!(spf.factorize(n).iter().all(|&(_, e)| e >= 2), "g({n}) ≠ 0");
        }
    }
}

#[test]
fn sup_never_below_plain_discrepancy() {
    let t = mu();
    let opts = SupOptions {
        restarts: 1,
        ..Default::default()
    };
    for q in [3u64, 7, 10, 16] {
        let sums = residue_sums(t, q, 20_000).unwrap();
        let plain = (0..q)
            .filter(|&a| gcd(a, q) == 1)
            .map(|a| sums[a as usize].norm())
            .fold(0.0, f64::max);
        let sup = sup_correlation(t, q, 20_000, &opts).unwrap();
        assert!(sup.value + 1e-9 >= plain, "q={q}: {} < {plain}", sup.value);
    }
}

#[test]
fn scan_flags_match_threshold() {
    let r = exceptional_scan(mu(), 30, 10_000, &PhaseSource::None, 0.5, ScanOptions::default()).unwrap();
    assert_eq!(r.rows.len(), 30);
    for row in &r.rows {
        assert_eq!(row.exceptional, row.value >= row.threshold);
    }
    assert_eq!(r.exceptional_count, r.rows.iter().filter(|x| x.exceptional).count());
}
