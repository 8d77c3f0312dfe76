//! Wall-clock coverage of the hot paths: orbit recursion, the two
//! Misiurewicz construction routes, polygon extraction, finite-field
//! distinct-degree factorization, and one full certificate.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use misiurewicz::modp::{ddf, reduce_mod};
use misiurewicz::padic::principal_polygon;
use misiurewicz::{certify, CertifyOptions, OrbitTable, Prime};

fn bench_orbit(c: &mut Criterion) {
    c.bench_function("orbit extend_to(5), d=3", |b| {
        b.iter_batched(
            || OrbitTable::new(3).unwrap(),
            |mut table| table.extend_to(5).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("misiurewicz construction, d=3 m=3");
    group.bench_function("direct", |b| {
        b.iter_batched(
            || OrbitTable::new(3).unwrap(),
            |mut table| table.misiurewicz_direct(3).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("via tau quotient", |b| {
        b.iter_batched(
            || OrbitTable::new(3).unwrap(),
            |mut table| table.misiurewicz_via_tau(3).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_polygon(c: &mut Criterion) {
    let mut table = OrbitTable::new(3).unwrap();
    let g4 = table.misiurewicz_direct(4).unwrap();
    let p = Prime::new(3).unwrap();
    c.bench_function("principal polygon of G_4, d=3", |b| {
        b.iter(|| principal_polygon(&g4, p).unwrap())
    });
}

fn bench_ddf(c: &mut Criterion) {
    let mut table = OrbitTable::new(3).unwrap();
    let g3 = table.misiurewicz_direct(3).unwrap();
    let reduced = reduce_mod(&g3, Prime::new(101).unwrap()).unwrap();
    c.bench_function("ddf of G_3 mod 101, d=3", |b| {
        b.iter(|| ddf(&reduced).unwrap())
    });
}

fn bench_certificate(c: &mut Criterion) {
    let opts = CertifyOptions::default();
    let mut group = c.benchmark_group("certificate");
    group.sample_size(20);
    group.bench_function("certify d=3 m=2 (modular evidence)", |b| {
        b.iter(|| certify(3, 2, &opts).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_orbit,
    bench_routes,
    bench_polygon,
    bench_ddf,
    bench_certificate
);
criterion_main!(benches);
