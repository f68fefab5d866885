//! Data-parallel verification sweeps against their sequential twins.
//!
//! With the default `parallel` feature the first entry of each pair runs
//! under rayon; built with `--no-default-features` both entries take the
//! sequential path and should coincide.

use criterion::{criterion_group, criterion_main, Criterion};
use minroots::oracle::CayleyBall;
use minroots::{brink, corpus, verify, words};

fn bench_sweeps(c: &mut Criterion) {
    // Small workload: cheap per-pair arithmetic, rayon overhead visible.
    let sys = corpus::figure1();
    let table = brink::build_table_brink(&sys, 1_000_000).unwrap().canonicalize().unwrap();
    let ball = CayleyBall::build(&sys, 9, 5_000_000).unwrap();
    // Large workload: degree-16 ring arithmetic per product.
    let heavy_sys = corpus::random_system(4, 3, true);
    let heavy_table =
        brink::build_table_brink(&heavy_sys, 1_000_000).unwrap().canonicalize().unwrap();
    let heavy_ball = CayleyBall::build(&heavy_sys, 7, 5_000_000).unwrap();

    let mut group = c.benchmark_group("agreement_sweep_small");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| verify::multiplication_agreement(&table, &ball).pairs)
    });
    group.bench_function("sequential", |b| {
        b.iter(|| verify::multiplication_agreement_seq(&table, &ball).pairs)
    });
    group.finish();

    let mut group = c.benchmark_group("agreement_sweep_rank4");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| verify::multiplication_agreement(&heavy_table, &heavy_ball).pairs)
    });
    group.bench_function("sequential", |b| {
        b.iter(|| verify::multiplication_agreement_seq(&heavy_table, &heavy_ball).pairs)
    });
    group.finish();

    let aff = corpus::affine_a2();
    let aff_table = brink::build_table_brink(&aff, 1_000_000).unwrap().canonicalize().unwrap();
    let mut group = c.benchmark_group("growth_enumeration");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| words::growth(&aff_table, 13, 5_000_000).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| words::growth_seq(&aff_table, 13, 5_000_000).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_sweeps);
criterion_main!(benches);
