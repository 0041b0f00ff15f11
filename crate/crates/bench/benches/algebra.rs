use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use hombundle_core::{cube_zero_locus, iso_decide, torus_quotient, FamilySpec};

fn quotients(c: &mut Criterion) {
    let e = FamilySpec::e(3).unwrap().bundle_spec().unwrap();
    let m = FamilySpec::m(2).bundle_spec().unwrap();
    c.bench_function("torus_quotient E_3", |b| {
        b.iter(|| torus_quotient(black_box(&e)).unwrap())
    });
    c.bench_function("torus_quotient M_2", |b| {
        b.iter(|| torus_quotient(black_box(&m)).unwrap())
    });
}

fn iso(c: &mut Criterion) {
    let e1 = FamilySpec::e(1).unwrap().cohomology().unwrap().ring;
    let e2 = FamilySpec::e(2).unwrap().cohomology().unwrap().ring;
    let m3 = FamilySpec::m(3).cohomology().unwrap().ring;
    c.bench_function("cube_zero_locus M_3", |b| {
        b.iter(|| cube_zero_locus(black_box(&m3)).unwrap())
    });
    c.bench_function("iso_decide E_1 E_2", |b| {
        b.iter(|| iso_decide(black_box(&e1), black_box(&e2)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = quotients, iso
}
criterion_main!(benches);
