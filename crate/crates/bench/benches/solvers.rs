use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use polyfloat_core::l1opt::{quotient_norm, QuotientMode, Tolerances};
use polyfloat_core::recovery::{nsp_constant, DEFAULT_NSP_BUDGET};
use polyfloat_core::rng::RngStream;
use polyfloat_core::samplers::{sample_matrix, DistributionSpec};

fn bench_quotient_norm(c: &mut Criterion) {
    let spec = DistributionSpec::gaussian(20);
    let gamma = sample_matrix(&spec, 2000, RngStream::new(1, 0)).unwrap();
    let a = gamma.design();
    let mut w = vec![0.0; 20];
    w[0] = 1.0;
    w[7] = -0.5;
    let tol = Tolerances::default();
    c.bench_function("quotient_norm gaussian 20x2000", |b| {
        b.iter(|| quotient_norm(black_box(&a), black_box(&w), QuotientMode::Symmetric, &tol))
    });
}

fn bench_nsp(c: &mut Criterion) {
    let spec = DistributionSpec::gaussian(6);
    let gamma = sample_matrix(&spec, 8, RngStream::new(2, 0)).unwrap();
    let a = gamma.design();
    c.bench_function("nsp_constant 6x8 s=2", |b| {
        b.iter(|| nsp_constant(black_box(&a), 2, DEFAULT_NSP_BUDGET))
    });
}

criterion_group!(benches, bench_quotient_norm, bench_nsp);
criterion_main!(benches);
