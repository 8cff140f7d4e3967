//! Transport of chains along flows by fixed-step RK4.

use std::sync::Arc;

use rayon::prelude::*;

use super::chain::GeometricChain;
use super::cube::{MapFn, SingularCube, TangentFn};
use super::quadrature::tensor_nodes;
use crate::error::{Error, Result};
use crate::kinematics::VectorFieldSpec;

pub const DEFAULT_STEPS: usize = 256;

/// A possibly time-dependent vector field on flow space.
pub trait Flow: Send + Sync {
    fn dim(&self) -> usize;
    fn velocity(&self, t: f64, x: &[f64]) -> Vec<f64>;
    /// `∂_j uⁱ` as `jac[j][i]`.
    fn jacobian(&self, t: f64, x: &[f64]) -> Vec<Vec<f64>>;
    /// Label of the exclusion zone containing `x`, if any.
    fn excluded(&self, x: &[f64]) -> Option<String>;
}

impl Flow for VectorFieldSpec {
    fn dim(&self) -> usize {
        VectorFieldSpec::dim(self)
    }

    fn velocity(&self, t: f64, x: &[f64]) -> Vec<f64> {
        VectorFieldSpec::velocity(self, t, x)
    }

    fn jacobian(&self, t: f64, x: &[f64]) -> Vec<Vec<f64>> {
        self.spatial_jacobian(t, x)
    }

    fn excluded(&self, x: &[f64]) -> Option<String> {
        self.excluded_by(x).map(|e| e.label.clone())
    }
}

/// A point with `k` attached tangent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Marker {
    pub x: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
}

fn rhs(flow: &dyn Flow, t: f64, m: &Marker) -> Marker {
    let u = flow.velocity(t, &m.x);
    let tangents = if m.tangents.is_empty() {
        Vec::new()
    } else {
        let j = flow.jacobian(t, &m.x);
        m.tangents
            .iter()
            .map(|v| {
                (0..u.len())
                    .map(|i| (0..u.len()).map(|s| j[s][i] * v[s]).sum())
                    .collect()
            })
            .collect()
    };
    Marker { x: u, tangents }
}

fn axpy(m: &Marker, a: f64, d: &Marker) -> Marker {
    Marker {
        x: m.x.iter().zip(&d.x).map(|(p, q)| p + a * q).collect(),
        tangents: m
            .tangents
            .iter()
            .zip(&d.tangents)
            .map(|(v, w)| v.iter().zip(w).map(|(p, q)| p + a * q).collect())
            .collect(),
    }
}

/// One classical RK4 step; fails if any stage point is excluded.
pub fn rk4_step(
    flow: &dyn Flow,
    t: f64,
    h: f64,
    m: &Marker,
) -> std::result::Result<Marker, String> {
    let check = |p: &Marker| match flow.excluded(&p.x) {
        Some(zone) => Err(format!("entered exclusion `{zone}` at {:?}", p.x)),
        None => Ok(()),
    };
    check(m)?;
    let k1 = rhs(flow, t, m);
    let m2 = axpy(m, h / 2.0, &k1);
    check(&m2)?;
    let k2 = rhs(flow, t + h / 2.0, &m2);
    let m3 = axpy(m, h / 2.0, &k2);
    check(&m3)?;
    let k3 = rhs(flow, t + h / 2.0, &m3);
    let m4 = axpy(m, h, &k3);
    check(&m4)?;
    let k4 = rhs(flow, t + h, &m4);
    let mut out = m.clone();
    for (i, o) in out.x.iter_mut().enumerate() {
        *o += h / 6.0 * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
    }
    for (j, v) in out.tangents.iter_mut().enumerate() {
        for (i, o) in v.iter_mut().enumerate() {
            *o += h / 6.0
                * (k1.tangents[j][i]
                    + 2.0 * k2.tangents[j][i]
                    + 2.0 * k3.tangents[j][i]
                    + k4.tangents[j][i]);
        }
    }
    check(&out)?;
    Ok(out)
}

/// Trajectory of one marker over `steps` equal steps, including the start.
pub fn trajectory(
    flow: &dyn Flow,
    start: Marker,
    t0: f64,
    t1: f64,
    steps: usize,
) -> std::result::Result<Vec<Marker>, (f64, String)> {
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let next = rk4_step(flow, t, h, out.last().unwrap()).map_err(|e| (t, e))?;
        out.push(next);
    }
    Ok(out)
}

/// A chain together with its images under the flow at sampled times.
#[derive(Clone)]
pub struct AdvectedChainFamily {
    pub base: GeometricChain,
    pub flow: Arc<dyn Flow>,
    pub order: usize,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub snapshots: Vec<GeometricChain>,
}

impl std::fmt::Debug for AdvectedChainFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AdvectedChainFamily")
            .field("degree", &self.base.degree())
            .field("order", &self.order)
            .field("t0", &self.t0)
            .field("t1", &self.t1)
            .field("steps", &self.steps)
            .finish()
    }
}

/// Transports every quadrature node (and its tangents) of `c` along `flow`.
pub fn advect_chain(
    c: &GeometricChain,
    flow: Arc<dyn Flow>,
    t0: f64,
    t1: f64,
    steps: usize,
    order: usize,
) -> Result<AdvectedChainFamily> {
    if steps == 0 {
        return Err(Error::Numeric("advection needs at least one step".into()));
    }
    if c.ambient() != flow.dim() {
        return Err(Error::DimensionMismatch {
            expected: flow.dim(),
            found: c.ambient(),
        });
    }
    let k = c.degree();
    let nodes = tensor_nodes(order, k);
    let mut starts = Vec::new();
    for (_, cube) in c.terms() {
        for (s, _) in &nodes {
            starts.push(Marker {
                x: cube.point(s)?,
                tangents: cube.tangents(s)?,
            });
        }
    }
    let trajectories: Vec<Result<Vec<Marker>>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, m)| {
            trajectory(flow.as_ref(), m, t0, t1, steps).map_err(|(time, reason)| Error::Advection {
                node: i,
                time,
                reason,
            })
        })
        .collect();
    let trajectories = trajectories.into_iter().collect::<Result<Vec<_>>>()?;
    let h = (t1 - t0) / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|i| t0 + i as f64 * h).collect();
    let per_cube = nodes.len();
    let snapshots = (0..=steps)
        .map(|j| {
            let mut chain = GeometricChain::empty(k, c.ambient());
            for (ci, (a, _)) in c.terms().iter().enumerate() {
                let slice = &trajectories[ci * per_cube..(ci + 1) * per_cube];
                let positions = slice.iter().map(|tr| tr[j].x.clone()).collect();
                let tangents = slice.iter().map(|tr| tr[j].tangents.clone()).collect();
                chain.push(
                    *a,
                    SingularCube::sampled(k, c.ambient(), order, positions, tangents),
                )?;
            }
            Ok(chain)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AdvectedChainFamily {
        base: c.clone(),
        flow,
        order,
        t0,
        t1,
        steps,
        times,
        snapshots,
    })
}

/// Transports one reference point of `cube` for a fraction `tau` of the family's span.
fn transport(
    flow: &dyn Flow,
    cube: &SingularCube,
    s: &[f64],
    t0: f64,
    t1: f64,
    steps: usize,
    tau: f64,
) -> Result<(Marker, f64)> {
    let mut m = Marker {
        x: cube.point(s)?,
        tangents: cube.tangents(s)?,
    };
    let h = (t1 - t0) / steps as f64;
    let target = tau * steps as f64;
    let full = (target.floor() as usize).min(steps);
    let mut t = t0;
    let fail = |t: f64, reason: String| Error::Advection {
        node: 0,
        time: t,
        reason,
    };
    for _ in 0..full {
        m = rk4_step(flow, t, h, &m).map_err(|e| fail(t, e))?;
        t += h;
    }
    let rest = target - full as f64;
    if rest > 0.0 {
        m = rk4_step(flow, t, rest * h, &m).map_err(|e| fail(t, e))?;
        t += rest * h;
    }
    Ok((m, t))
}

/// The `(k+1)`-chain traced by the advected chain, with the time parameter
/// in the first slot, so that its boundary is `final − initial + lateral`.
pub fn swept_chain(family: &AdvectedChainFamily) -> Result<GeometricChain> {
    if family.snapshots.len() < 2 {
        return Err(Error::Structural("need at least two snapshots".into()));
    }
    let k = family.base.degree();
    let n = family.base.ambient();
    let mut out = GeometricChain::empty(k + 1, n);
    for (a, cube) in family.base.terms() {
        if cube.is_sampled() {
            return Err(Error::Structural(
                "cannot sweep a sampled cube; sweep the original chain".into(),
            ));
        }
        let (flow, t0, t1, steps) = (family.flow.clone(), family.t0, family.t1, family.steps);
        let c1 = cube.clone();
        let f1 = flow.clone();
        let map: MapFn = Arc::new(move |p| {
            transport(f1.as_ref(), &c1, &p[1..], t0, t1, steps, p[0]).map(|(m, _)| m.x)
        });
        let c2 = cube.clone();
        let tangents: TangentFn = Arc::new(move |p| {
            let (m, t) = transport(flow.as_ref(), &c2, &p[1..], t0, t1, steps, p[0])?;
            let dtau: Vec<f64> = flow
                .velocity(t, &m.x)
                .into_iter()
                .map(|u| u * (t1 - t0))
                .collect();
            let mut all = vec![dtau];
            all.extend(m.tangents);
            Ok(all)
        });
        out.push(*a, SingularCube::new(k + 1, n, map, Some(tangents)))?;
    }
    Ok(out)
}
