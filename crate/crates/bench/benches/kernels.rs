use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpat_core::arithfn::sieve_mobius;
use gpat_core::bilinear::{type2_sum, TypeIIConfig};
use gpat_core::gowers::{gowers_norm, progression_sequence, ComplexSeq, Strategy};
use gpat_core::phases::{equidist_defect, PolyPhase};
use gpat_core::progressions::{tabulate_f_to, FSpec};
use std::hint::black_box;

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve_mobius");
    g.sample_size(10);
    for x in [1_000_000u64, 10_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(x), &x, |b, &x| b.iter(|| sieve_mobius(black_box(x)).unwrap()));
    }
    g.finish();
}

fn gowers(c: &mut Criterion) {
    let mu = sieve_mobius(1_000_000).unwrap();
    let mut g = c.benchmark_group("gowers");
    g.sample_size(10);
    for n in [10_000u64, 100_000] {
        let f = ComplexSeq::new(mu.slice_complex(1, n)).unwrap();
        g.bench_with_input(BenchmarkId::new("u2", n), &f, |b, f| b.iter(|| gowers_norm(f, 2, Strategy::Auto).unwrap()));
    }
    let f = progression_sequence(&mu, 7, 3, 30_000).unwrap();
    g.bench_function("u3_progression_q7", |b| b.iter(|| gowers_norm(&f, 3, Strategy::Auto).unwrap()));
    g.finish();
}

fn equidist(c: &mut Criterion) {
    let phi = PolyPhase::new(&[0.6180339887498949, 0.0001]).unwrap();
    let mut g = c.benchmark_group("equidist");
    g.sample_size(10);
    g.bench_function("n2000_delta0.1", |b| {
        b.iter(|| equidist_defect(&phi, black_box(2_000), 0.1, Default::default()).unwrap())
    });
    g.finish();
}

fn type2(c: &mut Criterion) {
    let cfg = TypeIIConfig::new(20, 2_000, 10, 0.1).unwrap();
    let spec = FSpec::random(1, 10, cfg.reach(), 8, 2).unwrap();
    let f = tabulate_f_to(&spec, cfg.reach());
    let mut g = c.benchmark_group("type2");
    g.sample_size(10);
    g.bench_function("k20_l2000", |b| b.iter(|| type2_sum(&cfg, &f).unwrap()));
    g.finish();
}

criterion_group!(benches, sieve, gowers, equidist, type2);
criterion_main!(benches);
