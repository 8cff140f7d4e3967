//! Standard singular cubes and chains.

use std::f64::consts::{PI, TAU};

use super::chain::GeometricChain;
use super::cube::SingularCube;
use crate::error::Result;

fn axpy(o: &[f64], terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = o.to_vec();
    for (a, v) in terms {
        for (x, y) in out.iter_mut().zip(v.iter()) {
            *x += a * y;
        }
    }
    out
}

/// The 0-cube at `x`.
pub fn point(x: Vec<f64>) -> SingularCube {
    let n = x.len();
    SingularCube::analytic(0, n, move |_| x.clone(), |_| Vec::new())
}

/// The affine `k`-cube `s ↦ origin + Σ s_j edges[j]`.
pub fn affine(origin: Vec<f64>, edges: Vec<Vec<f64>>) -> SingularCube {
    let n = origin.len();
    let k = edges.len();
    let e2 = edges.clone();
    SingularCube::analytic(
        k,
        n,
        move |s| {
            let terms: Vec<(f64, &[f64])> = s
                .iter()
                .zip(&edges)
                .map(|(a, e)| (*a, e.as_slice()))
                .collect();
            axpy(&origin, &terms)
        },
        move |_| e2.clone(),
    )
}

pub fn segment(a: Vec<f64>, b: Vec<f64>) -> SingularCube {
    let d: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
    affine(a, vec![d])
}

/// Consecutive segments through the given points.
pub fn polyline(points: &[Vec<f64>]) -> Result<GeometricChain> {
    GeometricChain::from_terms(
        points
            .windows(2)
            .map(|w| (1.0, segment(w[0].clone(), w[1].clone())))
            .collect(),
    )
}

/// Axis-aligned rectangle `[x0, x0+w] × [y0, y0+h]` as a 2-cube (plane case).
pub fn rectangle(origin: [f64; 2], width: f64, height: f64) -> SingularCube {
    affine(origin.to_vec(), vec![vec![width, 0.0], vec![0.0, height]])
}

/// Counterclockwise boundary of an axis-aligned square, as four segments.
pub fn square_boundary(origin: [f64; 2], side: f64) -> GeometricChain {
    let [x, y] = origin;
    let p = [
        vec![x, y],
        vec![x + side, y],
        vec![x + side, y + side],
        vec![x, y + side],
        vec![x, y],
    ];
    polyline(&p).expect("four segments")
}

/// Arc of radius `r` in the plane spanned by orthonormal `e1, e2`,
/// from angle `a0` to `a1`.
pub fn arc_in(
    center: Vec<f64>,
    r: f64,
    e1: Vec<f64>,
    e2: Vec<f64>,
    a0: f64,
    a1: f64,
) -> SingularCube {
    let n = center.len();
    let (f1, f2) = (e1.clone(), e2.clone());
    SingularCube::analytic(
        1,
        n,
        move |s| {
            let a = a0 + (a1 - a0) * s[0];
            axpy(&center, &[(r * a.cos(), &e1), (r * a.sin(), &e2)])
        },
        move |s| {
            let a = a0 + (a1 - a0) * s[0];
            let k = (a1 - a0) * r;
            vec![axpy(
                &vec![0.0; n],
                &[(-k * a.sin(), &f1), (k * a.cos(), &f2)],
            )]
        },
    )
}

/// Planar arc around `center`.
pub fn arc(center: [f64; 2], r: f64, a0: f64, a1: f64) -> SingularCube {
    arc_in(center.to_vec(), r, vec![1.0, 0.0], vec![0.0, 1.0], a0, a1)
}

/// Number of angular panels used for a sweep of `angle` radians.
///
/// Each panel spans at most an eighth of a turn so that order-8 quadrature
/// resolves the trigonometric parametrization.
pub fn panels(angle: f64) -> usize {
    ((angle.abs() / (PI / 4.0)) - 1e-9).ceil().max(1.0) as usize
}

/// Arc from `a0` to `a1` split into quarter-turn panels.
pub fn arc_chain_in(
    center: Vec<f64>,
    r: f64,
    e1: Vec<f64>,
    e2: Vec<f64>,
    a0: f64,
    a1: f64,
) -> GeometricChain {
    let m = panels(a1 - a0);
    let step = (a1 - a0) / m as f64;
    let mut c = GeometricChain::empty(1, center.len());
    for i in 0..m {
        let lo = a0 + step * i as f64;
        c.push(
            1.0,
            arc_in(center.clone(), r, e1.clone(), e2.clone(), lo, lo + step),
        )
        .expect("uniform degree");
    }
    c
}

/// Planar circle traversed `turns` times counterclockwise (negative for clockwise),
/// starting at angle 0.
pub fn circle(center: [f64; 2], r: f64, turns: f64) -> GeometricChain {
    arc_chain_in(
        center.to_vec(),
        r,
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        0.0,
        TAU * turns,
    )
}

/// Circle of radius `r` in the horizontal plane through `center` (3D).
pub fn horizontal_circle(center: [f64; 3], r: f64) -> GeometricChain {
    arc_chain_in(
        center.to_vec(),
        r,
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        0.0,
        TAU,
    )
}

/// Polar sector `(s0, s1) ↦ c + ρ (cos a e1 + sin a e2)` with
/// `ρ ∈ [r0, r1]`, `a ∈ [a0, a1]`.
pub fn sector_in(
    center: Vec<f64>,
    (r0, r1): (f64, f64),
    e1: Vec<f64>,
    e2: Vec<f64>,
    (a0, a1): (f64, f64),
) -> SingularCube {
    let n = center.len();
    let (c, f1, f2) = (center.clone(), e1.clone(), e2.clone());
    let da = a1 - a0;
    SingularCube::analytic(
        2,
        n,
        move |s| {
            let rho = r0 + (r1 - r0) * s[0];
            let a = a0 + da * s[1];
            axpy(&c, &[(rho * a.cos(), &e1), (rho * a.sin(), &e2)])
        },
        move |s| {
            let rho = r0 + (r1 - r0) * s[0];
            let a = a0 + da * s[1];
            let z = vec![0.0; n];
            vec![
                axpy(
                    &z,
                    &[((r1 - r0) * a.cos(), &f1), ((r1 - r0) * a.sin(), &f2)],
                ),
                axpy(&z, &[(-da * rho * a.sin(), &f1), (da * rho * a.cos(), &f2)]),
            ]
        },
    )
}

/// Polar annulus between radii `r0 < r1` in the plane of `e1, e2`, as four sectors.
pub fn annulus_in(
    center: Vec<f64>,
    r0: f64,
    r1: f64,
    e1: Vec<f64>,
    e2: Vec<f64>,
) -> GeometricChain {
    let mut c = GeometricChain::empty(2, center.len());
    for i in 0..4 {
        let a = PI / 2.0 * i as f64;
        c.push(
            1.0,
            sector_in(
                center.clone(),
                (r0, r1),
                e1.clone(),
                e2.clone(),
                (a, a + PI / 2.0),
            ),
        )
        .expect("uniform degree");
    }
    c
}

/// Polar disc in the plane of `e1, e2`, oriented by `e1 ∧ e2`.
pub fn disc_in(center: Vec<f64>, r: f64, e1: Vec<f64>, e2: Vec<f64>) -> GeometricChain {
    annulus_in(center, 0.0, r, e1, e2)
}

pub fn disc(center: [f64; 2], r: f64) -> GeometricChain {
    disc_in(center.to_vec(), r, vec![1.0, 0.0], vec![0.0, 1.0])
}

pub fn annulus(center: [f64; 2], r0: f64, r1: f64) -> GeometricChain {
    annulus_in(center.to_vec(), r0, r1, vec![1.0, 0.0], vec![0.0, 1.0])
}

/// Horizontal disc in 3D, oriented by `+z`.
pub fn horizontal_disc(center: [f64; 3], r: f64) -> GeometricChain {
    disc_in(center.to_vec(), r, vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0])
}

fn spherical(center: [f64; 3], rho: f64, t: f64, p: f64) -> Vec<f64> {
    vec![
        center[0] + rho * t.sin() * p.cos(),
        center[1] + rho * t.sin() * p.sin(),
        center[2] + rho * t.cos(),
    ]
}

/// Round sphere, outward oriented, as eight patches in `(θ, φ)`.
pub fn sphere(center: [f64; 3], r: f64) -> GeometricChain {
    let mut c = GeometricChain::empty(2, 3);
    for i in 0..2 {
        for j in 0..4 {
            let t0 = PI / 2.0 * i as f64;
            let p0 = PI / 2.0 * j as f64;
            let (dt, dp) = (PI / 2.0, PI / 2.0);
            let cube = SingularCube::analytic(
                2,
                3,
                move |s| spherical(center, r, t0 + dt * s[0], p0 + dp * s[1]),
                move |s| {
                    let (t, p) = (t0 + dt * s[0], p0 + dp * s[1]);
                    vec![
                        vec![
                            dt * r * t.cos() * p.cos(),
                            dt * r * t.cos() * p.sin(),
                            -dt * r * t.sin(),
                        ],
                        vec![-dp * r * t.sin() * p.sin(), dp * r * t.sin() * p.cos(), 0.0],
                    ]
                },
            );
            c.push(1.0, cube).expect("uniform degree");
        }
    }
    c
}

/// Solid ball in spherical coordinates, positively oriented, as eight pieces.
pub fn ball(center: [f64; 3], r: f64) -> GeometricChain {
    let mut c = GeometricChain::empty(3, 3);
    for i in 0..2 {
        for j in 0..4 {
            let t0 = PI / 2.0 * i as f64;
            let p0 = PI / 2.0 * j as f64;
            let (dt, dp) = (PI / 2.0, PI / 2.0);
            let cube = SingularCube::analytic(
                3,
                3,
                move |s| spherical(center, r * s[0], t0 + dt * s[1], p0 + dp * s[2]),
                move |s| {
                    let (rho, t, p) = (r * s[0], t0 + dt * s[1], p0 + dp * s[2]);
                    vec![
                        vec![r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()],
                        vec![
                            dt * rho * t.cos() * p.cos(),
                            dt * rho * t.cos() * p.sin(),
                            -dt * rho * t.sin(),
                        ],
                        vec![
                            -dp * rho * t.sin() * p.sin(),
                            dp * rho * t.sin() * p.cos(),
                            0.0,
                        ],
                    ]
                },
            );
            c.push(1.0, cube).expect("uniform degree");
        }
    }
    c
}

/// Axis-aligned box `origin + [0,a]×[0,b]×[0,c]`.
pub fn cuboid(origin: [f64; 3], a: f64, b: f64, c: f64) -> SingularCube {
    affine(
        origin.to_vec(),
        vec![vec![a, 0.0, 0.0], vec![0.0, b, 0.0], vec![0.0, 0.0, c]],
    )
}

/// Two counterclockwise lobes around `c1` and `c2` meeting at the midpoint.
///
/// Each lobe is a full circle through the midpoint, so the chain is a
/// closed loop whose class is the sum of the two basic cycles.
pub fn figure_eight(c1: [f64; 2], c2: [f64; 2]) -> GeometricChain {
    let mid = [(c1[0] + c2[0]) / 2.0, (c1[1] + c2[1]) / 2.0];
    let lobe = |c: [f64; 2]| {
        let (dx, dy) = (mid[0] - c[0], mid[1] - c[1]);
        let r = (dx * dx + dy * dy).sqrt();
        let a0 = dy.atan2(dx);
        arc_chain_in(c.to_vec(), r, vec![1.0, 0.0], vec![0.0, 1.0], a0, a0 + TAU)
    };
    lobe(c1).plus(&lobe(c2)).expect("two lobes")
}
