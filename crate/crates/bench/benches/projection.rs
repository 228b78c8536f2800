use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use plp_bench::suite;
use plp_core::oracle::fourier_motzkin;
use plp_core::plp::{project, SolveOptions};

fn projection(c: &mut Criterion) {
    let mut group = c.benchmark_group("project");
    group.sample_size(10);
    for inst in suite() {
        group.bench_function(&inst.name, |b| {
            b.iter(|| {
                let sol = project(black_box(&inst.poly), &inst.eliminate, &SolveOptions::default()).unwrap();
                sol.polyhedron().unwrap()
            })
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier_motzkin");
    group.sample_size(10);
    for inst in suite() {
        group.bench_function(&inst.name, |b| {
            b.iter(|| fourier_motzkin(black_box(&inst.poly), &inst.eliminate).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, projection, oracle);
criterion_main!(benches);
