use balanced_maps::balance::{is_balanced, is_locally_balanced};
use balanced_maps::cubic::{classify_real, trace_pullback, Branch, CubicParams, RealConfig};
use balanced_maps::enrich::pipeline;
use balanced_maps::ops::applicable_operations;
use balanced_maps::real_enum::verify_real_theorem;
use balanced_maps_bench::{random_balanced, real_graphs};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

fn balance_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("balance");
    for d in [4, 6, 8] {
        let maps = real_graphs(d);
        group.bench_with_input(BenchmarkId::new("global", d), &maps, |b, maps| {
            b.iter(|| maps.iter().filter(|om| is_balanced(black_box(om)).is_ok()).count())
        });
    }
    for d in [4, 5, 6] {
        let maps = random_balanced(d, 2, 16, 7);
        group.bench_with_input(BenchmarkId::new("local", d), &maps, |b, maps| {
            b.iter(|| maps.iter().filter(|om| is_locally_balanced(black_box(om)).is_ok_and(|v| v.balanced)).count())
        });
    }
    group.finish();
}

fn enrichment_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    for d in [3, 5, 7] {
        let maps = random_balanced(d, 1, 8, 11);
        group.bench_with_input(BenchmarkId::from_parameter(d), &maps, |b, maps| {
            b.iter(|| maps.iter().map(|om| pipeline(black_box(om), None).map(|r| r.labeled.labeling.m)).count())
        });
    }
    group.finish();
}

fn operations(c: &mut Criterion) {
    let maps = real_graphs(5);
    c.bench_function("applicable_operations/d5", |b| {
        b.iter(|| maps.iter().map(|om| applicable_operations(black_box(om)).len()).sum::<usize>())
    });
    c.bench_function("verify_real_theorem/d5", |b| b.iter(|| verify_real_theorem(black_box(5), false)));
}

fn cubic(c: &mut Criterion) {
    let params = CubicParams::from_c(Branch::Alpha, Complex64::new(-2.0, 0.0)).unwrap();
    let mut group = c.benchmark_group("cubic");
    for grid in [200, 400, 800] {
        group.bench_with_input(BenchmarkId::new("trace_pullback", grid), &grid, |b, &grid| {
            b.iter(|| trace_pullback(black_box(&params), grid))
        });
    }
    group.bench_function("classify_real", |b| b.iter(|| RealConfig::all().map(|cfg| classify_real(black_box(cfg)))));
    group.finish();
}

criterion_group!(benches, balance_checks, enrichment_pipeline, operations, cubic);
criterion_main!(benches);
