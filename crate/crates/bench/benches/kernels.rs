use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use vortexhom::complex::{betti_numbers, golden};
use vortexhom::forms::{exterior_derivative, FormField};
use vortexhom::integrate::{advect_chain, shapes, stokes, Flow, InvariantOptions};
use vortexhom::kinematics::VectorFieldSpec;
use vortexhom::scenarios;
use vortexhom::vortex::kelvin_check;

fn homology(c: &mut Criterion) {
    let ball = golden::golden("ball").unwrap();
    let punctured = golden::golden("doubly_punctured_plane").unwrap();
    c.bench_function("betti/ball", |b| {
        b.iter(|| betti_numbers(black_box(&ball)).unwrap())
    });
    c.bench_function("betti/doubly_punctured_plane", |b| {
        b.iter(|| betti_numbers(black_box(&punctured)).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    let alpha = FormField::new(3, 1, |x| vec![x[1] * x[2], x[0].sin(), x[0] * x[1]]);
    let disc = shapes::horizontal_disc([0.1, 0.2, 0.3], 0.8);
    c.bench_function("stokes/horizontal_disc/order8", |b| {
        b.iter(|| stokes(black_box(&alpha), &disc, 8).unwrap())
    });
    let beta = FormField::new(3, 2, |x| vec![x[0] * x[1], x[2].cos(), x[1]]);
    let ball = shapes::ball([0.0, 0.0, 0.0], 0.7);
    c.bench_function("stokes/ball/order8", |b| {
        b.iter(|| stokes(black_box(&beta), &ball, 8).unwrap())
    });
    let d = exterior_derivative(&beta);
    c.bench_function("exterior_derivative/eval", |b| {
        b.iter(|| d.value(black_box(&[0.3, -0.2, 0.5])))
    });
}

fn advection(c: &mut Criterion) {
    let rigid = VectorFieldSpec::steady(2, |x| vec![-x[1], x[0]]);
    let circle = shapes::circle([0.3, 0.0], 0.5, 1.0);
    let flow: std::sync::Arc<dyn Flow> = std::sync::Arc::new(rigid.clone());
    c.bench_function("advect/circle/64_steps", |b| {
        b.iter(|| advect_chain(black_box(&circle), flow.clone(), 0.0, 1.0, 64, 8).unwrap())
    });
    let pv = scenarios::builtin("point_vortex").unwrap();
    let cycle = pv.circulation_probe("winding=1").unwrap();
    let opts = InvariantOptions {
        steps: 64,
        ..Default::default()
    };
    let mut group = c.benchmark_group("kelvin");
    group.sample_size(10);
    group.bench_function("point_vortex/64_steps", |b| {
        b.iter(|| kelvin_check(&pv.spec, black_box(&cycle), 0.0, 1.0, &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, homology, quadrature, advection);
criterion_main!(benches);
