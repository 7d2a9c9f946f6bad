use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use plcvlc::montecarlo::{estimate, McConfig, Metric};
use plcvlc::specfun::{gauss_hermite, hyp2f1};
use plcvlc_bench::default_system;

fn analytic(c: &mut Criterion) {
    let sys = default_system();
    c.bench_function("gauss_hermite_30", |b| {
        b.iter(|| gauss_hermite(black_box(30)).unwrap())
    });
    c.bench_function("hyp2f1_large_negative_z", |b| {
        b.iter(|| hyp2f1(1.0, black_box(-0.2), 0.8, black_box(-7.5e5)).unwrap())
    });
    c.bench_function("plc_avg_capacity", |b| {
        b.iter(|| black_box(sys.plc()).avg_capacity().unwrap())
    });
    c.bench_function("vlc_capacity_closed", |b| {
        b.iter(|| black_box(sys.vlc()).avg_capacity_closed().unwrap())
    });
    c.bench_function("vlc_capacity_quad", |b| {
        b.iter(|| black_box(sys.vlc()).avg_capacity_quad().unwrap())
    });
    c.bench_function("e2e_avg_capacity", |b| {
        b.iter(|| black_box(&sys).e2e_avg_capacity().unwrap())
    });
}

fn sampling(c: &mut Criterion) {
    let sys = default_system();
    let mc = McConfig {
        trials: 100_000,
        ..McConfig::default()
    };
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("e2e_capacity_1e5", |b| {
        b.iter(|| estimate(Metric::E2eAvgCapacity, &sys, black_box(&mc)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, analytic, sampling);
criterion_main!(benches);
