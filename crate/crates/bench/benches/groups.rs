use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use pcentral::matgroups::{split_case, Kind};
use pcentral::splitting::certify;
use pcentral::words::hall_identity_suite;
use pcentral::{Builder, Series};
use pcentral_bench::{nz, random_pairs, sample_series};

fn build(c: &mut Criterion) {
    c.bench_function("build N^Z_3(2,2)", |b| b.iter(|| nz(2, 2, 3).unwrap()));
    c.bench_function("build N^Z_2(3,2)", |b| b.iter(|| nz(3, 2, 2).unwrap()));
}

fn multiply(c: &mut Criterion) {
    let g = nz(2, 2, 4).unwrap();
    let pairs = random_pairs(&g, 1024, 1);
    c.bench_function("mul x1024 in N^Z_4(2,2)", |b| {
        b.iter(|| pairs.iter().fold(0u32, |acc, &(x, y)| acc ^ g.mul(x, y)))
    });
    c.bench_function("commutator x1024 in N^Z_4(2,2)", |b| {
        b.iter(|| pairs.iter().fold(0u32, |acc, &(x, y)| acc ^ g.commutator(x, y)))
    });
}

fn series(c: &mut Criterion) {
    let s = sample_series(2, 3, 4).unwrap();
    c.bench_function("truncated product deg 4, rank 3", |b| b.iter(|| black_box(&s).smul(&s).unwrap()));
}

fn words(c: &mut Criterion) {
    c.bench_function("hall identities x100", |b| b.iter(|| hall_identity_suite(3, 100, 7).unwrap()));
}

fn splitting(c: &mut Criterion) {
    c.bench_function("SL_2(Z/4) complement search", |b| b.iter(|| split_case(Kind::SL, 2, 2).unwrap()));
    c.bench_function("certify (Z,3,2,1)", |b| {
        b.iter(|| certify(&Builder::new(), Series::Z, 3, 2, 1).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = build, multiply, series, words, splitting
}
criterion_main!(benches);
