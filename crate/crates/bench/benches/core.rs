use std::hint::black_box;

use conical::design::{verify, DEFAULT_TOL};
use conical::werner::{symmetric_decomposition, werner_state};
use conical::{cp_search, sic_fixture, sim_inball, theorem3_design, SearchConfig};
use conical_bench::centering;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    for d in [2usize, 3, 4, 5] {
        let design = sim_inball(d, 1.0 / (d as f64 - 1.0), 1.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &design, |b, design| {
            b.iter(|| verify(black_box(design), DEFAULT_TOL, 20))
        });
    }
    group.finish();
}

fn bench_construct(c: &mut Criterion) {
    let mut group = c.benchmark_group("theorem3_design");
    for d in [3usize, 5, 7] {
        let p = centering(d);
        group.bench_with_input(BenchmarkId::from_parameter(d), &p, |b, p| {
            b.iter(|| theorem3_design(black_box(p), 1.0).unwrap())
        });
    }
    group.finish();
}

fn bench_search(c: &mut Criterion) {
    let p = centering(3);
    let config = SearchConfig {
        restarts: 4,
        max_iters: 100,
        ..Default::default()
    };
    c.bench_function("cp_search/d3_4x100", |b| {
        b.iter(|| cp_search(black_box(&p), &config).unwrap())
    });
}

fn bench_decompose(c: &mut Criterion) {
    let target = werner_state(3, 0.2).unwrap().into();
    c.bench_function("symmetric_decomposition/d3", |b| {
        b.iter(|| symmetric_decomposition(black_box(&target), None).unwrap())
    });
    let sic = sic_fixture(3).unwrap();
    c.bench_function("verify/sic3_no_unitaries", |b| {
        b.iter(|| verify(black_box(&sic), DEFAULT_TOL, 0))
    });
}

criterion_group!(
    benches,
    bench_verify,
    bench_construct,
    bench_search,
    bench_decompose
);
criterion_main!(benches);
