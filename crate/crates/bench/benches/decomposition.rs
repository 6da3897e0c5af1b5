use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use duality_bench::{collection, triplet};
use duality_core::random::{random_symmetric, rng};
use duality_core::{statis, sym_eigen, StatisBasis};
use std::hint::black_box;

fn bench_sym_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("sym_eigen");
    for n in [10, 30, 80] {
        let a = random_symmetric(&mut rng(n as u64), n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| sym_eigen(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_diagram_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagram_eigen");
    for (n, p) in [(30, 10), (100, 8), (10, 60)] {
        let t = triplet(7, n, p);
        group.bench_with_input(BenchmarkId::new("n_p", format!("{n}x{p}")), &t, |b, t| {
            b.iter(|| black_box(t).diagram_eigen().unwrap())
        });
    }
    group.finish();
}

fn bench_statis(c: &mut Criterion) {
    let coll = collection(3, 40, 5);
    c.bench_function("statis_40x5", |b| {
        b.iter(|| statis(black_box(&coll), StatisBasis::Rv).unwrap())
    });
}

criterion_group!(benches, bench_sym_eigen, bench_diagram_eigen, bench_statis);
criterion_main!(benches);
