use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use vortexhom::forms::{Exclusion, FormField};
use vortexhom::integrate::{
    advect_chain, derham_classify, invariant_report, shapes, stokes, stokes_residual, swept_chain,
    Flow, GeometricChain, InvariantClass, InvariantOptions, Probe,
};
use vortexhom::kinematics::{covelocity_spatial, VectorFieldSpec};

fn angle_form() -> FormField {
    FormField::new(2, 1, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        vec![-x[1] / r2, x[0] / r2]
    })
    .with_domain(vortexhom::forms::Domain::spatial(vec![Exclusion::point(
        "origin",
        vec![0.0, 0.0],
        0.05,
    )]))
}

fn rigid(omega: f64) -> VectorFieldSpec {
    VectorFieldSpec::with_partials(
        2,
        true,
        move |_, x| vec![-omega * x[1], omega * x[0]],
        move |_, _| vec![vec![0.0, 0.0], vec![0.0, omega], vec![-omega, 0.0]],
    )
}

fn point_vortex() -> VectorFieldSpec {
    VectorFieldSpec::steady(2, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        vec![-x[1] / r2, x[0] / r2]
    })
    .with_exclusions(vec![Exclusion::point("origin", vec![0.0, 0.0], 0.2)])
}

#[test]
fn angle_form_winds() {
    let c = shapes::circle([0.0, 0.0], 1.0, 1.0);
    assert!((c.integrate(&angle_form(), 8).unwrap() - TAU).abs() < 1e-8);
    let c2 = shapes::circle([0.0, 0.0], 1.0, 2.0);
    assert!((c2.integrate(&angle_form(), 8).unwrap() - 2.0 * TAU).abs() < 1e-7);
    assert_eq!(
        GeometricChain::empty(1, 2)
            .integrate(&angle_form(), 8)
            .unwrap(),
        0.0
    );
}

#[test]
fn stokes_examples() {
    let x_dy = FormField::new(2, 1, |x| vec![0.0, x[0]]);
    let sq = GeometricChain::single(shapes::rectangle([0.0, 0.0], 1.0, 1.0));
    let r = stokes(&x_dy, &sq, 8).unwrap();
    assert!((r.interior_integral - 1.0).abs() < 1e-12);
    assert!(r.residual < 1e-10);
    let away = shapes::disc([2.0, 0.5], 0.5);
    assert!(stokes_residual(&angle_form(), &away, 8).unwrap() < 1e-8);
    let ball = shapes::ball([0.0; 3], 1.0);
    let a = FormField::new(3, 2, |x| vec![x[0] * x[1], x[2], x[0] * x[0]]);
    let r = stokes(&a, &ball, 8).unwrap();
    assert!(r.relative() < 1e-7, "{r:?}");
}

#[test]
fn derham_examples() {
    let probes = vec![
        Probe::cycle("circle", shapes::circle([0.0, 0.0], 1.0, 1.0)),
        Probe::boundary("square", shapes::square_boundary([1.0, 1.0], 0.5)),
    ];
    let c = derham_classify(&angle_form(), &probes, 1e-8, 8).unwrap();
    assert_eq!((c.closed, c.exact), (Some(true), Some(false)));
    let dpsi = FormField::new(2, 1, |x| vec![2.0 * x[0], 0.0]);
    let c = derham_classify(&dpsi, &probes, 1e-8, 8).unwrap();
    assert_eq!((c.closed, c.exact), (Some(true), Some(true)));
    let x_dy = FormField::new(2, 1, |x| vec![0.0, x[0]]);
    let c = derham_classify(&x_dy, &probes[1..], 1e-8, 8).unwrap();
    assert_eq!(c.closed, Some(false));
    assert!(derham_classify(&x_dy, &[], 1e-8, 8).unwrap().inconclusive);
}

#[test]
fn rigid_rotation_keeps_radius() {
    let c = shapes::circle([0.0, 0.0], 1.0, 1.0);
    let fam = advect_chain(&c, Arc::new(rigid(1.0)), 0.0, 1.7, 256, 8).unwrap();
    for snap in &fam.snapshots {
        for x in snap.node_points(8).unwrap() {
            assert!(((x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0).abs() < 1e-8);
        }
    }
    let u = VectorFieldSpec::steady(2, |_| vec![1.0, 0.0]);
    let fam = advect_chain(&c, Arc::new(u), 0.0, 2.0, 16, 8).unwrap();
    let a = c.node_points(8).unwrap();
    let b = fam.snapshots.last().unwrap().node_points(8).unwrap();
    for (p, q) in a.iter().zip(&b) {
        assert!((q[0] - p[0] - 2.0).abs() < 1e-12 && (q[1] - p[1]).abs() < 1e-12);
    }
}

#[test]
fn advection_into_exclusion_names_node() {
    let sink = VectorFieldSpec::steady(2, |x| vec![-x[0], -x[1]])
        .with_exclusions(vec![Exclusion::point("drain", vec![0.0, 0.0], 0.1)]);
    let c = shapes::circle([0.0, 0.0], 1.0, 1.0);
    let err = advect_chain(&c, Arc::new(sink), 0.0, 5.0, 64, 4).unwrap_err();
    assert!(matches!(err, vortexhom::Error::Advection { .. }), "{err}");
}

#[test]
fn swept_circle_pairs_with_closed_forms() {
    let c = shapes::circle([0.0, 0.0], 1.0, 1.0);
    let shear = VectorFieldSpec::steady(2, |x| vec![0.3 * x[1] + 0.1, 0.2]);
    let flow: Arc<dyn Flow> = Arc::new(shear);
    let fam = advect_chain(&c, flow, 0.0, 1.0, 64, 8).unwrap();
    let swept = swept_chain(&fam).unwrap();
    let closed = FormField::new(2, 1, |x| vec![x[1] * x[1] + 1.0, 2.0 * x[0] * x[1]]);
    let b = swept.boundary().unwrap().integrate(&closed, 8).unwrap();
    let fin = fam.snapshots.last().unwrap().integrate(&closed, 8).unwrap();
    let ini = c.integrate(&closed, 8).unwrap();
    assert!((b - (fin - ini)).abs() < 1e-8, "{b} vs {}", fin - ini);
    assert!(b.abs() < 1e-8);
    let pt = GeometricChain::single(shapes::point(vec![0.5, 0.0]));
    let fam = advect_chain(&pt, Arc::new(rigid(1.0)), 0.0, PI, 64, 8).unwrap();
    let traj = swept_chain(&fam).unwrap();
    assert_eq!(traj.degree(), 1);
    let end = traj.terms()[0].1.point(&[1.0]).unwrap();
    assert!((end[0] + 0.5).abs() < 1e-7 && end[1].abs() < 1e-7);
}

#[test]
fn area_is_absolute_for_incompressible_flow() {
    let disc = shapes::disc([0.5, 0.0], 0.4);
    let r = invariant_report(
        &FormField::volume(2),
        &rigid(1.0),
        &disc,
        0.0,
        1.0,
        &InvariantOptions {
            steps: 64,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(r.classification, InvariantClass::Absolute);
    assert!(r.rate_residual < 1e-5);
}

#[test]
fn covelocity_is_relative_for_point_vortex() {
    let spec = point_vortex();
    let v = covelocity_spatial(&spec, 0.0).unwrap();
    let c = shapes::circle([0.0, 0.0], 1.0, 1.0);
    let r = invariant_report(&v, &spec, &c, 0.0, TAU, &InvariantOptions::default()).unwrap();
    assert!(r.relative_drift() < 1e-6, "{}", r.lhs_drift);
    assert!(r.rate_residual < 1e-5, "{}", r.rate_residual);
    assert_eq!(r.classification, InvariantClass::Relative, "{:?}", r.probes);
    assert!(r.beta_witness.is_some());
}

#[test]
fn non_invariant_matches_lie_integral() {
    let alpha = FormField::new(2, 1, |x| vec![0.0, x[0] * x[0]]);
    let u = VectorFieldSpec::steady(2, |_| vec![1.0, 0.0]);
    let seg = GeometricChain::single(shapes::segment(vec![0.0, 0.0], vec![0.0, 1.0]));
    let r = invariant_report(&alpha, &u, &seg, 0.0, 1.0, &InvariantOptions::default()).unwrap();
    assert_eq!(r.classification, InvariantClass::NotInvariant);
    assert!(r.rate_residual < 1e-5);
    assert!((r.series.last().unwrap() - 1.0).abs() < 1e-10);
}
