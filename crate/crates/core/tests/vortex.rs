use std::f64::consts::{PI, TAU};

use vortexhom::forms::Exclusion;
use vortexhom::integrate::{shapes, GeometricChain, InvariantOptions};
use vortexhom::kinematics::VectorFieldSpec;
use vortexhom::vortex::*;

fn point_vortex(gamma: f64) -> VectorFieldSpec {
    VectorFieldSpec::steady(2, move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let k = gamma / TAU / r2;
        vec![-k * x[1], k * x[0]]
    })
    .with_exclusions(vec![
        Exclusion::point("origin", vec![0.0, 0.0], 0.2).with_strength(gamma)
    ])
}

fn doubly() -> VectorFieldSpec {
    let field = |x: &[f64], c: f64, g: f64| {
        let (dx, dy) = (x[0] - c, x[1]);
        let k = g / TAU / (dx * dx + dy * dy);
        [-k * dy, k * dx]
    };
    VectorFieldSpec::steady(2, move |x| {
        let a = field(x, -1.0, TAU);
        let b = field(x, 1.0, PI);
        vec![a[0] + b[0], a[1] + b[1]]
    })
    .with_exclusions(vec![
        Exclusion::point("left", vec![-1.0, 0.0], 0.2).with_strength(TAU),
        Exclusion::point("right", vec![1.0, 0.0], 0.2).with_strength(PI),
    ])
}

fn rigid3(omega: f64) -> VectorFieldSpec {
    VectorFieldSpec::steady(3, move |x| vec![-omega * x[1], omega * x[0], 0.0])
}

#[test]
fn circulation_examples() {
    let pv = point_vortex(3.0);
    let c = shapes::circle([0.0, 0.0], 1.0, 1.0);
    assert!((circulation(&pv, &c, 0.0, 8).unwrap() - 3.0).abs() < 1e-10);
    let b = shapes::square_boundary([0.5, 0.5], 0.3);
    assert!(circulation(&pv, &b, 0.0, 8).unwrap().abs() < 1e-10);
    let grad = VectorFieldSpec::steady(2, |x| vec![2.0 * x[0], 1.0]);
    let seg = GeometricChain::single(shapes::segment(vec![0.0, 0.0], vec![1.0, 2.0]));
    assert!((circulation(&grad, &seg, 0.0, 8).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn flux_examples() {
    let rigid = VectorFieldSpec::steady(2, |x| vec![-0.5 * x[1], 0.5 * x[0]]);
    let d = shapes::disc([0.0, 0.0], 1.0);
    let f = vorticity_flux(&rigid, &d, 0.0, 8).unwrap();
    assert!((f - PI).abs() < 1e-8);
    let b = d.boundary().unwrap();
    assert!((circulation(&rigid, &b, 0.0, 8).unwrap() - f).abs() < 1e-7);
    let s = shapes::sphere([0.0; 3], 1.0);
    let shear = VectorFieldSpec::steady(3, |x| vec![x[1] * x[2], x[0] * x[0], x[1]]);
    assert!(vorticity_flux(&shear, &s, 0.0, 8).unwrap().abs() < 1e-8);
}

#[test]
fn invariance_and_winding() {
    let pv = point_vortex(TAU);
    let c1 = shapes::circle([0.0, 0.0], 1.0, 1.0);
    let c2 = shapes::circle([0.0, 0.0], 2.0, 1.0);
    let r = homology_invariance_check(&pv, &c1, &c2, None, 0.0, 8).unwrap();
    assert!(r.pass && (r.value - TAU).abs() < 1e-8);
    let w2 = shapes::circle([0.0, 0.0], 1.0, 2.0);
    assert!(
        !homology_invariance_check(&pv, &c1, &w2, None, 0.0, 8)
            .unwrap()
            .pass
    );
    let rep = winding_circulation(&pv, "twice", &w2, 0.0, 8).unwrap();
    assert_eq!(rep.winding, Some(2));
    assert!((rep.value - 2.0 * TAU).abs() < 1e-7);
    let out = shapes::circle([3.0, 0.0], 1.0, 1.0);
    let rep = winding_circulation(&pv, "outside", &out, 0.0, 8).unwrap();
    assert_eq!(rep.winding, Some(0));
    assert_eq!(rep.windings[0].winding, 0);
    let fig = shapes::figure_eight([-1.0, 0.0], [1.0, 0.0]);
    let rep = winding_circulation(&doubly(), "eight", &fig, 0.0, 8).unwrap();
    assert!((rep.value - 3.0 * PI).abs() < 1e-7, "{rep:?}");
    assert!((rep.expected.unwrap() - 3.0 * PI).abs() < 1e-12);
    let open = GeometricChain::single(shapes::arc([0.0, 0.0], 1.0, 0.0, 3.0));
    assert!(matches!(
        winding_circulation(&pv, "open", &open, 0.0, 8),
        Err(vortexhom::Error::NonClosedLoop { .. })
    ));
}

#[test]
fn kelvin_examples() {
    let opts = InvariantOptions::default();
    let pv = point_vortex(TAU);
    let c = shapes::circle([0.0, 0.0], 1.0, 1.0);
    let r = kelvin_check(&pv, &c, 0.0, TAU, &opts).unwrap();
    assert!(r.passed(), "{:?}", r.checks);
    let rigid = VectorFieldSpec::steady(2, |x| vec![-x[1], x[0]]);
    let c = shapes::circle([0.3, 0.0], 0.5, 1.0);
    let r = kelvin_check(&rigid, &c, 0.0, TAU, &opts).unwrap();
    assert!(r.passed(), "{:?}", r.checks);
    assert!((r.invariant.initial() - 2.0 * PI * 0.25).abs() < 1e-10);
    let still = VectorFieldSpec::steady(2, |_| vec![0.0, 0.0]);
    let r = kelvin_check(&still, &c, 0.0, 1.0, &opts).unwrap();
    assert_eq!(r.invariant.lhs_drift, 0.0);
}

#[test]
fn helmholtz_examples() {
    let opts = InvariantOptions::default();
    let rigid = VectorFieldSpec::steady(2, |x| vec![-x[1], x[0]]);
    let d = shapes::disc([0.4, 0.0], 0.5);
    let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![0.1 * i as f64 - 0.5, 0.3]).collect();
    let r = helmholtz_check(&rigid, &d, 0.0, TAU, &pts, &opts).unwrap();
    assert!(r.passed(), "{:?}", r.checks);
    let shear = VectorFieldSpec::steady(3, |x| vec![x[1] * x[1], x[2], x[0]]);
    let p3: Vec<Vec<f64>> = (0..10).map(|i| vec![0.1 * i as f64, 0.3, -0.2]).collect();
    let (a, b) = vortex_line_lie_residuals(&shear, 0.0, &p3).unwrap();
    assert!(a < 1e-6 && b < 1e-6, "{a} {b}");
}

#[test]
fn tube_in_rigid_rotation() {
    let spec = rigid3(1.5);
    let cap = shapes::horizontal_disc([0.2, 0.1, 0.0], 0.5);
    let t = vortex_tube(&spec, &cap, 2.0, 0.0, 64, 8).unwrap();
    let area = PI * 0.25;
    assert!((t.form_flux[0] - 3.0 * area).abs() < 1e-8, "{t:?}");
    assert!((t.vector_flux[0] - 1.5 * area).abs() < 1e-8);
    assert!(t.passed(), "{t:?}");
    let tube = t.swept.unwrap();
    assert_eq!(tube.degree(), 3);
    let flat = VectorFieldSpec::steady(3, |_| vec![1.0, 0.0, 0.0]);
    assert!(matches!(
        vortex_tube(&flat, &cap, 1.0, 0.0, 8, 8),
        Err(vortexhom::Error::DegenerateTube(_))
    ));
}
