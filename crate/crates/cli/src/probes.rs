//! Chains and sample points chosen from a scenario's geometry.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexhom::forms::ExclusionShape;
use vortexhom::integrate::{shapes, GeometricChain};
use vortexhom::scenarios::Scenario;
use vortexhom::Result;

/// Cap on the radius of surfaces and volumes placed at the probe point.
pub const SURFACE_RADIUS: f64 = 0.25;

/// Bounds on the default advection time.
pub const MIN_REVOLUTION: f64 = 0.5;
pub const MAX_REVOLUTION: f64 = TAU;

/// Radius of a disc or ball about the probe point that stays clear of exclusions.
pub fn surface_radius(s: &Scenario) -> f64 {
    s.clear_radius(&s.probe_point, SURFACE_RADIUS)
}

/// A disc (horizontal in 3D) about the probe point.
pub fn surface(s: &Scenario) -> Result<GeometricChain> {
    s.disc_at(&s.probe_point, surface_radius(s))
}

/// A top-degree chain about the probe point: a disc in 2D, a ball in 3D.
pub fn volume(s: &Scenario) -> Result<GeometricChain> {
    let r = surface_radius(s);
    let c = &s.probe_point;
    match s.dim() {
        3 => Ok(shapes::ball([c[0], c[1], c[2]], r)),
        _ => s.disc_at(c, r),
    }
}

/// A closed 2-chain about the probe point in 3D.
pub fn closed_surface(s: &Scenario) -> Option<GeometricChain> {
    let c = &s.probe_point;
    (s.dim() == 3).then(|| shapes::sphere([c[0], c[1], c[2]], surface_radius(s)))
}

/// The probe loop of the scenario: one turn of radius `probe_radius` about the origin.
pub fn cycle(s: &Scenario) -> Result<GeometricChain> {
    s.circulation_probe("winding=1")
}

/// Time for one turn of the probe loop at the speed found on it, clamped.
pub fn revolution_time(s: &Scenario) -> f64 {
    let r = s.probe_radius;
    let mut x = s.probe_center();
    x[0] += r;
    if s.spec.excluded_by(&x).is_some() {
        return MAX_REVOLUTION;
    }
    let speed = s
        .spec
        .velocity(0.0, &x)
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    if !(speed > 0.0) {
        return MAX_REVOLUTION;
    }
    (TAU * r / speed).clamp(MIN_REVOLUTION, MAX_REVOLUTION)
}

/// Pairs of homologous loops for circulation invariance: two radii about each
/// point exclusion, and about the origin when there is none.
pub fn homologous_loops(s: &Scenario) -> Result<Vec<(String, GeometricChain, GeometricChain)>> {
    let mut out = Vec::new();
    for e in &s.exclusions {
        let ExclusionShape::Point { center } = &e.shape else {
            continue;
        };
        if s.dim() != 2 {
            continue;
        }
        let nearest = s
            .exclusions
            .iter()
            .filter(|o| o.label != e.label)
            .map(|o| o.distance(center) - o.radius)
            .fold(f64::INFINITY, f64::min);
        let r0 = (0.5 * nearest).min(1.0).max(2.0 * e.radius);
        let r1 = 0.75 * r0;
        out.push((
            format!("around {}", e.label),
            s.probe_circle(center, r0, 1.0)?,
            s.probe_circle(center, r1, 1.0)?,
        ));
    }
    if s.exclusions.is_empty() {
        let c = s.probe_center();
        let r = s.probe_radius;
        out.push((
            "origin".into(),
            s.probe_circle(&c, r, 1.0)?,
            s.probe_circle(&c, 0.5 * r, 1.0)?,
        ));
    }
    Ok(out)
}

/// Small square boundaries at seeded random positions clear of exclusions.
pub fn boundary_loops(s: &Scenario, count: usize, seed: u64) -> Vec<GeometricChain> {
    let side = 0.3;
    let n = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 1000 {
        tries += 1;
        let x: Vec<f64> = s
            .bounds()
            .iter()
            .map(|&(lo, hi)| rng.random_range(lo..(hi - side).max(lo + 1e-9)))
            .collect();
        let mut centre = x.clone();
        centre.iter_mut().take(2).for_each(|c| *c += 0.5 * side);
        if s.clear_radius(&centre, 1.0) < side {
            continue;
        }
        let mut e1 = vec![0.0; n];
        let mut e2 = vec![0.0; n];
        e1[0] = side;
        e2[1] = side;
        if let Ok(b) = GeometricChain::single(shapes::affine(x, vec![e1, e2])).boundary() {
            out.push(b);
        }
    }
    out
}

/// Streamline seeds: the probe point and two scaled copies, when clear.
pub fn streamline_seeds(s: &Scenario) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for k in [1.0, 1.3, 0.7] {
        let x: Vec<f64> = s.probe_point.iter().map(|c| k * c).collect();
        if s.clear_radius(&x, 1.0) > 0.05 {
            out.push(x);
        }
    }
    out
}
