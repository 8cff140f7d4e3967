//! Kinematic fields derived from a velocity field.

mod frobenius;
mod spec;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{
    algebra, divergence, exterior_derivative, lie_derivative, sharp_inverse, wedge, EvalFn, Field,
    FormField, MultiVectorField, VolumeElement,
};

pub use frobenius::{frobenius_classify, FrobeniusReport, FROBENIUS_TOLERANCE};
pub use spec::VectorFieldSpec;

/// Factor between the vorticity vector used here and the conventional curl.
pub const VORTICITY_VECTOR_SCALE: f64 = 0.5;

/// Flow labelled incompressible when `|div v|` stays below this on samples.
pub const INCOMPRESSIBLE_TOLERANCE: f64 = 1e-8;

fn tx(t: f64, x: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(x.len() + 1);
    p.push(t);
    p.extend_from_slice(x);
    p
}

/// The spacetime covelocity `dt + v_i dxⁱ` with `v_i = g_ij vʲ`.
pub fn covelocity(spec: &VectorFieldSpec) -> Result<FormField> {
    let n = spec.dim();
    let v = spec.spacetime_velocity();
    let domain = v.0.domain().clone();
    if spec.metric().is_euclidean() {
        return Ok(FormField(Field::from_parts(
            n + 1,
            1,
            v.0.eval_fn().clone(),
            v.0.jac_fn().cloned(),
            domain,
        )));
    }
    let metric = spec.metric().clone();
    let ev = v.0.eval_fn().clone();
    let e: EvalFn = Arc::new(move |p: &[f64]| {
        let vals = ev(p);
        let g = metric.matrix(&p[1..]);
        let mut out = vec![1.0];
        for i in 0..n {
            out.push((0..n).map(|j| g[i * n + j] * vals[1 + j]).sum());
        }
        out
    });
    Ok(FormField(Field::from_parts(n + 1, 1, e, None, domain)))
}

/// The spatial covelocity `v_s` at time `t`.
pub fn covelocity_spatial(spec: &VectorFieldSpec, t: f64) -> Result<FormField> {
    Ok(covelocity(spec)?.at_time(t))
}

/// Pointwise decomposition of the spatial velocity gradient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityGradient {
    /// `gradient[i][j] = ∂_j vⁱ`.
    pub gradient: Vec<Vec<f64>>,
    /// `ė = g + gᵀ`.
    pub strain_rate: Vec<Vec<f64>>,
    /// `ω = g − gᵀ`.
    pub spin: Vec<Vec<f64>>,
    /// `(1/n) ∂_k vᵏ`.
    pub trace_rate: f64,
    /// Trace-free part of the strain rate.
    pub deviatoric: Vec<Vec<f64>>,
    /// `∂_t vⁱ`.
    pub time_part: Vec<f64>,
}

impl VelocityGradient {
    pub fn divergence(&self) -> f64 {
        (0..self.gradient.len()).map(|i| self.gradient[i][i]).sum()
    }
}

/// Velocity gradient at `(t, x)`; Euclidean coordinates only.
pub fn velocity_gradient(spec: &VectorFieldSpec, t: f64, x: &[f64]) -> Result<VelocityGradient> {
    if !spec.metric().is_euclidean() {
        return Err(Error::Precondition(
            "velocity gradient decomposition needs orthonormal coordinates".into(),
        ));
    }
    spec.check_point(x)?;
    let n = spec.dim();
    let jac = spec.spatial_jacobian(t, x);
    let gradient: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| jac[j][i]).collect())
        .collect();
    if gradient.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite velocity gradient at {x:?}"
        )));
    }
    let strain_rate: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| gradient[i][j] + gradient[j][i]).collect())
        .collect();
    let spin: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| gradient[i][j] - gradient[j][i]).collect())
        .collect();
    let div: f64 = (0..n).map(|i| gradient[i][i]).sum();
    let mean_strain = (0..n).map(|i| strain_rate[i][i]).sum::<f64>() / n as f64;
    let deviatoric = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| strain_rate[i][j] - if i == j { mean_strain } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(VelocityGradient {
        gradient,
        strain_rate,
        spin,
        trace_rate: div / n as f64,
        deviatoric,
        time_part: spec.time_derivative(t, x),
    })
}

/// `div v = ∂_k vᵏ` at `(t, x)`.
pub fn compressibility(spec: &VectorFieldSpec, t: f64, x: &[f64]) -> Result<f64> {
    spec.check_point(x)?;
    let jac = spec.spatial_jacobian(t, x);
    Ok((0..spec.dim()).map(|k| jac[k][k]).sum())
}

/// `div v_s = #⁻¹ d #v_s` as a scalar field at time `t`.
pub fn compressibility_field(spec: &VectorFieldSpec, t: f64) -> Result<FormField> {
    let div = divergence(&spec.spatial_velocity(t))?;
    Ok(FormField(div.0))
}

/// Largest `|div v|` over the sample points and times.
pub fn max_compressibility(
    spec: &VectorFieldSpec,
    points: &[Vec<f64>],
    times: &[f64],
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut worst = 0.0f64;
    for &t in times {
        for x in points {
            worst = worst.max(compressibility(spec, t, x)?.abs());
        }
    }
    Ok(worst)
}

/// `|L_v V − (div v) V|` at `(t, x)`, with `L_v V` from Cartan's formula.
pub fn volume_lie_residual(spec: &VectorFieldSpec, t: f64, x: &[f64]) -> Result<f64> {
    let n = spec.dim();
    let lie = lie_derivative(&spec.spatial_velocity(t), &VolumeElement::unit(n).form())?;
    let lhs = lie.try_value(x)?[0];
    Ok((lhs - compressibility(spec, t, x)?).abs())
}

/// The vorticity 2-form `Ω = dv` on spacetime slots.
pub fn vorticity_form(spec: &VectorFieldSpec) -> Result<FormField> {
    Ok(exterior_derivative(&covelocity(spec)?))
}

/// Spatial vorticity `ω = d_s v_s` at time `t`.
pub fn vorticity_spatial(spec: &VectorFieldSpec, t: f64) -> Result<FormField> {
    Ok(vorticity_form(spec)?.at_time(t))
}

fn vorticity_dual_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "vorticity dual needs 2 or 3 spatial dimensions, got {n}"
        )))
    }
}

/// Planar vorticity scalar `∂₁v₂ − ∂₂v₁` at time `t`.
pub fn vorticity_scalar(spec: &VectorFieldSpec, t: f64) -> Result<FormField> {
    if spec.dim() != 2 {
        return Err(Error::Precondition(format!(
            "vorticity scalar needs 2 spatial dimensions, got {}",
            spec.dim()
        )));
    }
    Ok(FormField(sharp_inverse(&vorticity_spatial(spec, t)?).0))
}

/// Vorticity vector `ωⁱ = ½ εⁱʲᵏ(∂_j v_k − ∂_k v_j)` at time `t` (3D), or
/// the scalar dual as a 0-vector in 2D.
pub fn vorticity_vector(spec: &VectorFieldSpec, t: f64) -> Result<MultiVectorField> {
    vorticity_dual_dim(spec.dim())?;
    let dual = sharp_inverse(&vorticity_spatial(spec, t)?);
    if spec.dim() == 3 {
        Ok(dual.scaled(VORTICITY_VECTOR_SCALE))
    } else {
        Ok(dual)
    }
}

/// Convective acceleration `a = L_v v` on spacetime slots.
pub fn convective_acceleration(spec: &VectorFieldSpec) -> Result<FormField> {
    let v = covelocity(spec)?;
    lie_derivative(spec.spacetime_velocity(), &v)
}

fn lowered_partials(
    spec: &VectorFieldSpec,
    t: f64,
    x: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let v = covelocity(spec)?;
    let p = tx(t, x);
    let vals = v.try_value(&p)?;
    let jac = v.0.try_jacobian(&p)?;
    Ok((vals, jac))
}

/// Convected derivative `∂_t v_i + vʲ ∂_j v_i` of the covelocity.
pub fn convected_derivative(spec: &VectorFieldSpec, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    spec.check_point(x)?;
    let n = spec.dim();
    let (_, jac) = lowered_partials(spec, t, x)?;
    let u = spec.velocity(t, x);
    Ok((0..n)
        .map(|i| jac[0][i + 1] + (0..n).map(|j| u[j] * jac[j + 1][i + 1]).sum::<f64>())
        .collect())
}

/// `½ ∂_i (v_j vʲ)`.
pub fn half_grad_speed_squared(spec: &VectorFieldSpec, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    let n = spec.dim();
    let (low, ljac) = lowered_partials(spec, t, x)?;
    let u = spec.velocity(t, x);
    let ujac = spec.spatial_jacobian(t, x);
    Ok((0..n)
        .map(|i| {
            0.5 * (0..n)
                .map(|j| ljac[i + 1][j + 1] * u[j] + low[j + 1] * ujac[i][j])
                .sum::<f64>()
        })
        .collect())
}

/// Max deviation of the spatial part of `L_v v` from `dv_s/dt + ½ d(v²)`.
pub fn acceleration_split_residual(spec: &VectorFieldSpec, t: f64, x: &[f64]) -> Result<f64> {
    let a = convective_acceleration(spec)?.try_value(&tx(t, x))?;
    let dvdt = convected_derivative(spec, t, x)?;
    let half = half_grad_speed_squared(spec, t, x)?;
    Ok((0..spec.dim())
        .map(|i| (a[i + 1] - dvdt[i] - half[i]).abs())
        .fold(0.0, f64::max))
}

/// Conventional curl of the spatial velocity from its jacobian (3D).
pub fn curl(spec: &VectorFieldSpec, t: f64, x: &[f64]) -> Vec<f64> {
    let j = spec.spatial_jacobian(t, x);
    vec![j[1][2] - j[2][1], j[2][0] - j[0][2], j[0][1] - j[1][0]]
}

/// Max over `points` of `|div ω|` at time `t` (3D).
pub fn vorticity_divergence_residual(
    spec: &VectorFieldSpec,
    t: f64,
    points: &[Vec<f64>],
) -> Result<f64> {
    if spec.dim() != 3 {
        return Err(Error::Precondition("vorticity divergence needs 3D".into()));
    }
    let div = divergence(&vorticity_vector(spec, t)?)?;
    let mut worst = 0.0f64;
    for x in points {
        worst = worst.max(div.try_value(x)?[0].abs());
    }
    Ok(worst)
}

/// Max over `points` of `|curl v − div(#⁻¹ v_s)|` at time `t` (3D).
///
/// The left side comes from velocity partials, the right from the bivector
/// potential through `#⁻¹`, `d` and `#`.
pub fn bivector_potential_residual(
    spec: &VectorFieldSpec,
    t: f64,
    points: &[Vec<f64>],
) -> Result<f64> {
    if spec.dim() != 3 {
        return Err(Error::Precondition("bivector potential needs 3D".into()));
    }
    let b = sharp_inverse(&covelocity_spatial(spec, t)?);
    let div_b = divergence(&b)?;
    let mut worst = 0.0f64;
    for x in points {
        let lhs = curl(spec, t, x);
        let rhs = div_b.try_value(x)?;
        for i in 0..3 {
            worst = worst.max((lhs[i] - rhs[i]).abs());
        }
    }
    Ok(worst)
}

/// Max over `points` of `|g(v_s, curl v) − (v_s ∧ d_s v_s)(V)|` at time `t` (3D).
pub fn helicity_identity_residual(
    spec: &VectorFieldSpec,
    t: f64,
    points: &[Vec<f64>],
) -> Result<f64> {
    if spec.dim() != 3 {
        return Err(Error::Precondition("helicity identity needs 3D".into()));
    }
    let vs = covelocity_spatial(spec, t)?;
    let f = wedge(&vs, &exterior_derivative(&vs))?;
    let mut worst = 0.0f64;
    for x in points {
        let v = spec.velocity(t, x);
        let c = curl(spec, t, x);
        let lhs: f64 = (0..3).map(|i| v[i] * c[i]).sum();
        let rhs = algebra::component(3, &f.try_value(x)?, &[0, 1, 2]);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
