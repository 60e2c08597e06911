use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qsync_bench::two_peak_params;
use qsync_core::measures::{linspace, wigner};
use qsync_core::{measure_all, solve_steady_state, MeasureConfig};

fn steady_state(c: &mut Criterion) {
    let mut g = c.benchmark_group("steady_state");
    g.sample_size(10);
    for dim in [20, 40] {
        let p = two_peak_params(dim);
        g.bench_with_input(BenchmarkId::from_parameter(dim), &p, |b, p| {
            b.iter(|| solve_steady_state(black_box(p), 1e-9, 1e-6).unwrap())
        });
    }
    g.finish();
}

fn measures(c: &mut Criterion) {
    let rho = solve_steady_state(&two_peak_params(40), 1e-9, 1e-6)
        .unwrap()
        .rho;
    let cfg = MeasureConfig::default();
    c.bench_function("measure_all/40", |b| {
        b.iter(|| measure_all(black_box(&rho), &cfg).unwrap())
    });
}

fn wigner_grid(c: &mut Criterion) {
    let rho = solve_steady_state(&two_peak_params(40), 1e-9, 1e-6)
        .unwrap()
        .rho;
    let axis = linspace(-4.0, 4.0, 81);
    let mut g = c.benchmark_group("wigner");
    g.sample_size(10);
    g.bench_function("81x81/40", |b| {
        b.iter(|| wigner(black_box(&rho), &axis, &axis).unwrap())
    });
    g.finish();
}

criterion_group!(benches, steady_state, measures, wigner_grid);
criterion_main!(benches);
