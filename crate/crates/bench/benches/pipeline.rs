use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use weblab_bench::{dense_series, generic_web};
use weblab_core::abelian::derive_system;
use weblab_core::blaschke::trace_formula_check;
use weblab_core::connection::{connection_of, prolong};
use weblab_core::rank::{build_rank_matrix, rank_of_web};

const N: usize = 12;

fn series_kernel(c: &mut Criterion) {
    let a = dense_series(N);
    let b = dense_series(N).derive_x().unwrap().extend_exact(N);
    let mut g = c.benchmark_group("series");
    g.bench_function("mul", |bench| bench.iter(|| black_box(&a) * black_box(&b)));
    g.bench_function("invert", |bench| bench.iter(|| black_box(&a).invert().unwrap()));
    g.finish();
}

fn stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("stages");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    for d in [3, 4] {
        let w = generic_web(d, N);
        let sys = derive_system(&w).unwrap();
        let conn = connection_of(&w).unwrap();
        g.bench_with_input(BenchmarkId::new("system", d), &w, |bench, w| bench.iter(|| derive_system(w).unwrap()));
        g.bench_with_input(BenchmarkId::new("prolong", d), &sys, |bench, sys| bench.iter(|| prolong(sys).unwrap()));
        g.bench_with_input(BenchmarkId::new("rank", d), &conn, |bench, conn| {
            bench.iter(|| rank_of_web(&build_rank_matrix(conn).unwrap()).unwrap())
        });
    }
    g.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut g = c.benchmark_group("end_to_end");
    g.sample_size(10).measurement_time(Duration::from_secs(30));
    for d in [4, 5] {
        let w = generic_web(d, N);
        g.bench_with_input(BenchmarkId::new("rank", d), &w, |bench, w| {
            bench.iter(|| rank_of_web(&build_rank_matrix(&connection_of(w).unwrap()).unwrap()).unwrap())
        });
    }
    let w = generic_web(4, N);
    g.bench_function("trace_check/4", |bench| bench.iter(|| trace_formula_check(&w).unwrap()));
    g.finish();
}

criterion_group!(benches, series_kernel, stages, end_to_end);
criterion_main!(benches);
