use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use hombundle_core::homgeo::bounds::{gaussian, rng};
use hombundle_core::homgeo::{curvature_operator_min_eig, curvature_tensor, ricci, sec_bounds};
use hombundle_core::{FamilySpec, MetricFamily};

fn curvature(c: &mut Criterion) {
    let e = MetricFamily::new(FamilySpec::e(1).unwrap().geometry().unwrap(), 0.5).unwrap();
    let m = MetricFamily::new(FamilySpec::m(2).geometry().unwrap(), 0.5).unwrap();
    let mut r = rng(1);
    let v: Vec<_> = (0..4)
        .map(|_| e.from_frame(&gaussian(&mut r, e.tangent_dim())))
        .collect();

    c.bench_function("curvature_tensor E_1", |b| {
        b.iter(|| curvature_tensor(&e, &v[0], &v[1], &v[2], black_box(&v[3])).unwrap())
    });
    c.bench_function("sec_bounds M_2 200 samples", |b| {
        b.iter(|| sec_bounds(black_box(&m), 200, 10, 1))
    });
    c.bench_function("ricci E_1", |b| b.iter(|| ricci(black_box(&e)).unwrap()));
    c.bench_function("curvature operator M_2", |b| {
        b.iter(|| curvature_operator_min_eig(black_box(&m)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = curvature
}
criterion_main!(benches);
