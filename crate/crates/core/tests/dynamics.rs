use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use vortexhom::dynamics::*;
use vortexhom::forms::{Exclusion, FormField};
use vortexhom::grid::Grid;
use vortexhom::integrate::{shapes, GeometricChain};
use vortexhom::kinematics::VectorFieldSpec;

fn grid2(res: usize) -> Grid {
    Grid::new(vec![(-1.5, 1.5), (-1.5, 1.5)], res).unwrap()
}

fn grid3(res: usize) -> Grid {
    Grid::new(vec![(-1.0, 1.0); 3], res).unwrap()
}

fn hydrostatic() -> FluidState {
    let g = 9.81;
    let rho = 1.2;
    let spec = VectorFieldSpec::steady(3, |_| vec![0.0; 3]);
    let u = spacetime_scalar(3, &spec, move |_, x| rho * g * x[2]);
    let pi = spacetime_scalar(3, &spec, move |_, x| 101.0 - rho * g * x[2]);
    FluidState::incompressible(spec, rho)
        .with_potential(u)
        .unwrap()
        .with_pressure(pi)
        .unwrap()
}

fn rigid(omega: f64, rho: f64) -> FluidState {
    let spec = VectorFieldSpec::steady(2, move |x| vec![-omega * x[1], omega * x[0]]);
    let pi = spacetime_scalar(2, &spec, move |_, x| {
        2.0 + 0.5 * rho * omega * omega * (x[0] * x[0] + x[1] * x[1])
    });
    FluidState::incompressible(spec, rho)
        .with_pressure(pi)
        .unwrap()
}

fn expansion() -> FluidState {
    let spec = VectorFieldSpec::steady(3, |x| x.iter().map(|c| c / 3.0).collect());
    let rho = spacetime_scalar(3, &spec, |t, _| (-t).exp());
    FluidState::new(spec, rho).unwrap()
}

fn point_vortex(gamma: f64, rho: f64) -> FluidState {
    let spec = VectorFieldSpec::steady(2, move |x| {
        let k = gamma / TAU / (x[0] * x[0] + x[1] * x[1]);
        vec![-k * x[1], k * x[0]]
    })
    .with_exclusions(vec![
        Exclusion::point("origin", vec![0.0, 0.0], 0.2).with_strength(gamma)
    ]);
    let pi = spacetime_scalar(2, &spec, move |_, x| {
        5.0 - rho * gamma * gamma / (8.0 * PI * PI * (x[0] * x[0] + x[1] * x[1]))
    });
    FluidState::incompressible(spec, rho)
        .with_pressure(pi)
        .unwrap()
}

#[test]
fn hydrostatic_balance() {
    let s = hydrostatic();
    let g = grid3(6);
    s.validate(&g.points(), &[0.0]).unwrap();
    let e = euler_residual(&s, &g, 0.0).unwrap();
    assert!(e.pass && e.max_residual < 1e-10, "{e:?}");
    assert!(e.check("temporal").unwrap().value < 1e-10);
    let p = power_balance_residual(&s, &g, 0.0).unwrap();
    assert!(p.pass, "{p:?}");
    assert!(continuity_residual(&s, &g, 0.0).unwrap().pass);
    let c = GeometricChain::single(shapes::cuboid([-0.5; 3], 1.0, 1.0, 1.0));
    let m = mass_balance_cochain(&s, &c, 0.0, 6).unwrap();
    assert!(m.pass && m.max_residual < 1e-10, "{m:?}");
}

#[test]
fn rigid_rotation_balance() {
    let s = rigid(0.8, 1.3);
    let g = grid2(12);
    let e = euler_residual(&s, &g, 0.0).unwrap();
    assert!(e.pass && e.max_residual < 1e-8, "{e:?}");
    assert!(e.check("lie_form").unwrap().pass);
    let p = power_balance_residual(&s, &g, 0.0).unwrap();
    assert!(p.pass && p.max_residual < 1e-7, "{p:?}");
    assert!(continuity_residual(&s, &g, 0.0).unwrap().pass);
    let (_, m) = magnus_force(&s, &g, 0.0).unwrap();
    assert!(m.pass, "{m:?}");
}

#[test]
fn rigid_rotation_with_potential_checks_head() {
    let (omega, rho) = (0.8, 1.3);
    let mut s = rigid(omega, rho);
    let u = spacetime_scalar(2, &s.spec, |_, x| 0.3 * x[0]);
    // Shift the pressure so the added force stays balanced.
    let pi = spacetime_scalar(2, &s.spec, move |_, x| {
        2.0 + 0.5 * rho * omega * omega * (x[0] * x[0] + x[1] * x[1]) - 0.3 * x[0]
    });
    s.pressure = None;
    let s = s.with_potential(u).unwrap().with_pressure(pi).unwrap();
    let g = grid2(10);
    let p = power_balance_residual(&s, &g, 0.0).unwrap();
    assert!(p.pass && p.check("head_rate").unwrap().pass, "{p:?}");
    let (_, m) = magnus_force(&s, &g, 0.0).unwrap();
    assert!(m.check("conservative_form").unwrap().pass, "{m:?}");
}

#[test]
fn unbalanced_pressure_fails_euler() {
    let mut s = rigid(1.0, 1.0);
    s.pressure = Some(spacetime_scalar(2, &s.spec, |_, _| 1.0));
    let e = euler_residual(&s, &grid2(8), 0.0).unwrap();
    assert!(!e.pass);
    assert!((e.max_residual - 1.5).abs() < 1e-8, "{}", e.max_residual);
}

#[test]
fn free_flow_is_balanced() {
    let spec = VectorFieldSpec::steady(2, |_| vec![1.0, 0.5]);
    let pi = spacetime_scalar(2, &spec, |_, _| 1.0);
    let s = FluidState::incompressible(spec, 1.0)
        .with_pressure(pi)
        .unwrap();
    let e = euler_residual(&s, &grid2(5), 0.0).unwrap();
    assert_eq!(e.max_residual, 0.0);
}

#[test]
fn expansion_continuity_and_mass() {
    let s = expansion();
    let g = grid3(6);
    for t in [0.0, 0.7] {
        let c = continuity_residual(&s, &g, t).unwrap();
        assert!(c.pass && c.max_residual < 1e-8, "{c:?}");
    }
    let chain = GeometricChain::single(shapes::cuboid([-0.3, -0.2, 0.1], 0.7, 0.5, 0.6));
    let m = mass_balance_cochain(&s, &chain, 0.4, 6).unwrap();
    assert!(m.pass && m.max_residual < 1e-6, "{m:?}");
    let e = euler_residual(&s, &g, 0.0).unwrap();
    assert!(!e.applicable);
}

#[test]
fn continuity_counterexample() {
    let spec = VectorFieldSpec::steady(3, |_| vec![1.0, 0.0, 0.0]);
    let rho = spacetime_scalar(3, &spec, |_, x| 1.0 + x[0] * x[0]);
    let s = FluidState::new(spec, rho).unwrap();
    let c = continuity_residual(&s, &grid3(5), 0.0).unwrap();
    assert!(!c.pass);
    assert!((c.max_residual - 2.0).abs() < 1e-8);
    let chain = GeometricChain::single(shapes::cuboid([0.0; 3], 1.0, 1.0, 1.0));
    let m = mass_balance_cochain(&s, &chain, 0.0, 6).unwrap();
    // Outflow minus inflow through the x-faces: (1 + 1) − 1.
    assert!(!m.pass && (m.max_residual - 1.0).abs() < 1e-8, "{m:?}");
}

#[test]
fn point_vortex_bernoulli() {
    let s = point_vortex(TAU, 1.1);
    let seeds = vec![vec![0.5, 0.0], vec![1.0, 0.0], vec![0.0, 1.4]];
    let r = bernoulli_check(&s, &seeds, 2.0 * PI, 256).unwrap();
    assert!(r.applicable && r.pass, "{r:?}");
    for c in &r.chain_residuals {
        assert!(c.residual <= 1e-6 * c.scale.max(1.0));
    }
    assert!(r.check("info:cross_streamline_spread").unwrap().value < 1e-9);

    let mut wrong = s.clone();
    wrong.pressure = Some(spacetime_scalar(2, &s.spec, |_, x| 5.0 + x[0]));
    let r = bernoulli_check(&wrong, &seeds, 2.0, 64).unwrap();
    assert!(r.applicable && !r.pass);
}

#[test]
fn bernoulli_preconditions() {
    let s = expansion()
        .with_pressure(spacetime_scalar(3, &expansion().spec, |_, _| 1.0))
        .unwrap();
    let r = bernoulli_check(&s, &[vec![0.1, 0.1, 0.1]], 0.5, 16).unwrap();
    assert!(!r.applicable && r.note.contains("incompressible"));
    let r = bernoulli_check(&expansion(), &[vec![0.1, 0.1, 0.1]], 0.5, 16).unwrap();
    assert!(!r.applicable);
    let mut rr = rigid(1.0, 1.0);
    rr = rr
        .with_force(FormField::constant(3, 1, vec![0.0, 0.0, 1.0]))
        .unwrap();
    let r = bernoulli_check(&rr, &[vec![0.5, 0.0]], 0.5, 16).unwrap();
    assert!(!r.applicable && r.note.contains("potential"));
}

#[test]
fn uniform_flow_bernoulli() {
    let spec = VectorFieldSpec::steady(2, |_| vec![1.0, 0.0]);
    let pi = spacetime_scalar(2, &spec, |_, _| 3.0);
    let s = FluidState::incompressible(spec, 1.0)
        .with_pressure(pi)
        .unwrap();
    let r = bernoulli_check(&s, &[vec![0.0, 0.0]], 1.0, 8).unwrap();
    assert!(r.pass && r.max_residual == 0.0);
}

#[test]
fn shear_magnus_is_orthogonal() {
    let spec = VectorFieldSpec::steady(2, |x| vec![0.7 * x[1], 0.0]);
    let pi = spacetime_scalar(2, &spec, |_, _| 1.0);
    let s = FluidState::incompressible(spec, 1.0)
        .with_pressure(pi)
        .unwrap();
    let g = grid2(7);
    let (m, rep) = magnus_force(&s, &g, 0.0).unwrap();
    assert!(rep.pass, "{rep:?}");
    let val = m.value(&[0.0, 0.3, 0.9]);
    assert!(val[1..].iter().any(|c| c.abs() > 0.1));
    assert!(rep.check("orthogonal").unwrap().value < 1e-10);
}

#[test]
fn irrotational_magnus_vanishes() {
    let s = point_vortex(TAU, 1.0);
    let (m, rep) = magnus_force(&s, &grid2(8), 0.0).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(m.value(&[0.0, 0.6, -0.8]).iter().all(|c| c.abs() < 1e-8));
}

#[test]
fn barotropic_cases() {
    let spec = VectorFieldSpec::steady(2, |_| vec![0.0, 0.0]);
    let pi = spacetime_scalar(2, &spec, |_, x| 1.0 + x[0] + x[1] * x[1]);
    let rho = spacetime_scalar(2, &spec, |_, x| {
        let p = 1.0 + x[0] + x[1] * x[1];
        1.0 + p * p
    });
    let eos: EquationOfState = Arc::new(|p| 1.0 + p * p);
    let s = FluidState::new(spec.clone(), rho)
        .unwrap()
        .with_pressure(pi.clone())
        .unwrap()
        .with_eos(eos);
    let g = grid2(9);
    let r = barotropic_check(&s, &g, 0.0).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.check("equation_of_state").unwrap().pass);

    let rho = spacetime_scalar(2, &spec, |_, x| 2.0 + x[0]);
    let pi = spacetime_scalar(2, &spec, |_, x| x[1]);
    let s = FluidState::new(spec.clone(), rho)
        .unwrap()
        .with_pressure(pi)
        .unwrap();
    let r = barotropic_check(&s, &g, 0.0).unwrap();
    assert!(!r.pass && (r.max_residual - 1.0).abs() < 1e-8);

    let s = FluidState::incompressible(spec.clone(), 1.0)
        .with_pressure(spacetime_scalar(2, &spec, |_, x| x[0] * x[1]))
        .unwrap();
    assert!(barotropic_check(&s, &g, 0.0).unwrap().pass);
}

#[test]
fn conservation_of_work() {
    let spec = VectorFieldSpec::steady(2, |_| vec![0.0, 0.0]);
    let phi = |x: &[f64]| x[0] * x[0] * x[1] + x[1].sin();
    let u = spacetime_scalar(2, &spec, move |_, x| -phi(x));
    let s = FluidState::incompressible(spec, 1.0)
        .with_potential(u)
        .unwrap();
    let seg = GeometricChain::single(shapes::segment(vec![0.1, -0.3], vec![0.9, 0.4]));
    let w = work(&s, &seg, 0.0, 8).unwrap();
    assert!((w - (phi(&[0.9, 0.4]) - phi(&[0.1, -0.3]))).abs() < 1e-8);
    let b = shapes::square_boundary([-0.4, 0.2], 0.5);
    assert!(work(&s, &b, 0.0, 8).unwrap().abs() < 1e-7);
}

#[test]
fn state_validation() {
    let spec = VectorFieldSpec::steady(2, |_| vec![0.0, 0.0]);
    let rho = spacetime_scalar(2, &spec, |_, x| x[0]);
    let s = FluidState::new(spec, rho).unwrap();
    assert!(s.validate(&[vec![-0.5, 0.0]], &[0.0]).is_err());
    assert!(FluidState::new(
        VectorFieldSpec::steady(2, |_| vec![0.0, 0.0]),
        FormField::scalar(2, |_| 1.0)
    )
    .is_err());
}
