//! Circulation, vorticity flux, topological vortices, vortex tubes and the
//! Kelvin and Helmholtz checks.

mod tube;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, lie_derivative, pair, ExclusionShape, FormField};
use crate::integrate::{
    invariant_report, GeometricChain, InvariantOptions, InvariantReport, NamedCheck,
};
use crate::kinematics::{covelocity_spatial, vorticity_spatial, vorticity_vector, VectorFieldSpec};

pub use tube::{extrude, vortex_tube, VortexLineFlow, VortexTube, TUBE_TOLERANCE};

/// Relative tolerance for homology invariance of integrals.
pub const INVARIANCE_TOLERANCE: f64 = 1e-6;
/// Endpoint gap allowed for a closed loop.
pub const LOOP_CLOSURE: f64 = 1e-10;
/// Relative drift allowed over an advected cycle or surface.
pub const DRIFT_TOLERANCE: f64 = 1e-5;
/// Pointwise bound on `L_ω Ω` and `L_ω v − d(v(ω))`.
pub const LIE_TOLERANCE: f64 = 1e-6;

/// `C[c] = ∫_c v_s` at time `t`.
pub fn circulation(
    spec: &VectorFieldSpec,
    c: &GeometricChain,
    t: f64,
    order: usize,
) -> Result<f64> {
    if c.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: c.degree(),
        });
    }
    c.integrate(&covelocity_spatial(spec, t)?, order)
}

/// `Φ_ω[c] = ∫_c Ω` at time `t`.
pub fn vorticity_flux(
    spec: &VectorFieldSpec,
    c: &GeometricChain,
    t: f64,
    order: usize,
) -> Result<f64> {
    if c.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: c.degree(),
        });
    }
    let omega = vorticity_spatial(spec, t)?;
    if omega.is_identically_zero() {
        return Ok(0.0);
    }
    c.integrate(&omega, order)
}

/// Comparison of one cochain on two chains, optionally with a homology witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub degree: usize,
    pub value: f64,
    pub value_prime: f64,
    pub residual: f64,
    /// `∫_w dα` for a witness `w` with `∂w = c′ − c`, when one was given.
    pub witness_integral: Option<f64>,
    pub pass: bool,
}

/// Circulation (degree 1) or vorticity flux (degree 2) on `c` and `c′`.
pub fn homology_invariance_check(
    spec: &VectorFieldSpec,
    c: &GeometricChain,
    c_prime: &GeometricChain,
    witness: Option<&GeometricChain>,
    t: f64,
    order: usize,
) -> Result<InvarianceReport> {
    if c.degree() != c_prime.degree() {
        return Err(Error::DegreeMismatch {
            expected: c.degree(),
            found: c_prime.degree(),
        });
    }
    let form: FormField = match c.degree() {
        1 => covelocity_spatial(spec, t)?,
        2 => vorticity_spatial(spec, t)?,
        k => {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: k,
            })
        }
    };
    let integral = |ch: &GeometricChain| -> Result<f64> {
        if form.is_identically_zero() {
            Ok(0.0)
        } else {
            ch.integrate(&form, order)
        }
    };
    let value = integral(c)?;
    let value_prime = integral(c_prime)?;
    let residual = (value - value_prime).abs();
    let witness_integral = match witness {
        Some(w) => {
            let dform = exterior_derivative(&form);
            Some(if dform.is_identically_zero() {
                0.0
            } else {
                w.integrate(&dform, order)?
            })
        }
        None => None,
    };
    Ok(InvarianceReport {
        degree: c.degree(),
        value,
        value_prime,
        residual,
        witness_integral,
        pass: residual < INVARIANCE_TOLERANCE * (1.0 + value.abs()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PunctureWinding {
    pub label: String,
    pub strength: f64,
    pub winding: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirculationReport {
    pub cycle: String,
    pub value: f64,
    /// Reference strength: the smallest nonzero declared puncture strength.
    pub strength: Option<f64>,
    /// `round(C / strength)`.
    pub winding: Option<i64>,
    pub integrality_residual: Option<f64>,
    /// Geometric winding of the loop about each declared puncture.
    pub windings: Vec<PunctureWinding>,
    /// `Σ winding · strength` over punctures.
    pub expected: Option<f64>,
}

/// Samples per cube used for angle accumulation.
const WINDING_SAMPLES: usize = 256;

fn planar(shape: &ExclusionShape, x: &[f64]) -> Option<(f64, f64)> {
    match shape {
        ExclusionShape::Point { center } if x.len() == 2 => {
            Some((x[0] - center[0], x[1] - center[1]))
        }
        ExclusionShape::Line { point, direction } if x.len() == 3 => {
            // Coordinates in a plane orthogonal to the line.
            let d = direction;
            let helper = if d[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            let dot = helper[0] * d[0] + helper[1] * d[1] + helper[2] * d[2];
            let mut e1: Vec<f64> = (0..3).map(|i| helper[i] - dot * d[i]).collect();
            let n1 = e1.iter().map(|a| a * a).sum::<f64>().sqrt();
            e1.iter_mut().for_each(|a| *a /= n1);
            let e2 = [
                d[1] * e1[2] - d[2] * e1[1],
                d[2] * e1[0] - d[0] * e1[2],
                d[0] * e1[1] - d[1] * e1[0],
            ];
            let r: Vec<f64> = (0..3).map(|i| x[i] - point[i]).collect();
            Some((
                (0..3).map(|i| r[i] * e1[i]).sum(),
                (0..3).map(|i| r[i] * e2[i]).sum(),
            ))
        }
        _ => None,
    }
}

/// Winding number of a closed 1-chain about an exclusion, by accumulated angle.
pub fn winding_number(loop_: &GeometricChain, shape: &ExclusionShape) -> Result<Option<i64>> {
    let mut total = 0.0;
    for (a, cube) in loop_.terms() {
        let mut prev: Option<f64> = None;
        let mut acc = 0.0;
        for i in 0..=WINDING_SAMPLES {
            let s = i as f64 / WINDING_SAMPLES as f64;
            let x = cube.point(&[s])?;
            let Some((px, py)) = planar(shape, &x) else {
                return Ok(None);
            };
            let th = py.atan2(px);
            if let Some(p) = prev {
                let mut d = th - p;
                d -= TAU * (d / TAU).round();
                acc += d;
            }
            prev = Some(th);
        }
        total += a * acc;
    }
    Ok(Some((total / TAU).round() as i64))
}

/// Circulation of a closed loop in a flow with declared punctures.
pub fn winding_circulation(
    spec: &VectorFieldSpec,
    label: &str,
    loop_: &GeometricChain,
    t: f64,
    order: usize,
) -> Result<CirculationReport> {
    if loop_.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: loop_.degree(),
        });
    }
    let gap = loop_.endpoint_gap()?;
    if gap > LOOP_CLOSURE {
        return Err(Error::NonClosedLoop { gap });
    }
    let value = circulation(spec, loop_, t, order)?;
    let mut windings = Vec::new();
    for e in spec.exclusions() {
        if let Some(s) = e.strength {
            if let Some(w) = winding_number(loop_, &e.shape)? {
                windings.push(PunctureWinding {
                    label: e.label.clone(),
                    strength: s,
                    winding: w,
                });
            }
        }
    }
    let strength = windings
        .iter()
        .map(|w| w.strength)
        .filter(|s| *s != 0.0)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()));
    let ratio = strength.map(|s| value / s);
    Ok(CirculationReport {
        cycle: label.into(),
        value,
        strength,
        winding: ratio.map(|r| r.round() as i64),
        integrality_residual: ratio.map(|r| (r - r.round()).abs()),
        expected: (!windings.is_empty())
            .then(|| windings.iter().map(|w| w.winding as f64 * w.strength).sum()),
        windings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KelvinReport {
    pub invariant: InvariantReport,
    /// Max over snapshots of `|∮ L_v v|`.
    pub cycle_lie_max: f64,
    pub checks: Vec<NamedCheck>,
}

impl KelvinReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn drift_check(name: &str, r: &InvariantReport) -> NamedCheck {
    let scale = r.initial().abs();
    NamedCheck {
        name: name.into(),
        value: r.lhs_drift,
        threshold: DRIFT_TOLERANCE * scale,
        pass: r.lhs_drift <= DRIFT_TOLERANCE * scale + 1e-12,
    }
}

/// Advects a 1-cycle along the flow and tracks its circulation.
pub fn kelvin_check(
    spec: &VectorFieldSpec,
    cycle: &GeometricChain,
    t0: f64,
    t1: f64,
    opts: &InvariantOptions,
) -> Result<KelvinReport> {
    if cycle.degree() != 1 || !cycle.is_cycle(1e-8)? {
        return Err(Error::Precondition(
            "kelvin check needs a closed 1-chain".into(),
        ));
    }
    let v = covelocity_spatial(spec, t0)?;
    let alpha = if spec.is_steady() {
        v
    } else {
        FormField(crate::kinematics::covelocity(spec)?.0)
    };
    let invariant = invariant_report(&alpha, spec, cycle, t0, t1, opts)?;
    let cycle_lie_max = invariant
        .lie_integral
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    let scale = 1.0 + invariant.initial().abs();
    let checks = vec![
        drift_check("circulation_drift", &invariant),
        NamedCheck::below("cycle_lie_integral", cycle_lie_max, DRIFT_TOLERANCE * scale),
        invariant.checks[0].clone(),
    ];
    Ok(KelvinReport {
        invariant,
        cycle_lie_max,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelmholtzReport {
    pub invariant: InvariantReport,
    /// Max over samples of `|L_ω Ω|`.
    pub lie_omega_max: f64,
    /// Max over samples of `|L_ω v − d(v(ω))|`.
    pub lie_omega_v_max: f64,
    pub checks: Vec<NamedCheck>,
}

impl HelmholtzReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `(max |L_ω Ω|, max |L_ω v − d(v(ω))|)` over spatial samples at time `t`.
///
/// Planar flows are extruded along `z` first.
pub fn vortex_line_lie_residuals(
    spec: &VectorFieldSpec,
    t: f64,
    points: &[Vec<f64>],
) -> Result<(f64, f64)> {
    if spec.dim() == 2 {
        let lifted: Vec<Vec<f64>> = points.iter().map(|p| vec![p[0], p[1], 0.0]).collect();
        return vortex_line_lie_residuals(&extrude(spec)?, t, &lifted);
    }
    let omega = vorticity_vector(spec, t)?;
    let big = vorticity_spatial(spec, t)?;
    let v = covelocity_spatial(spec, t)?;
    let l_big = lie_derivative(&omega, &big)?;
    let l_v = lie_derivative(&omega, &v)?;
    let d_vw = exterior_derivative(&pair(&v, &omega)?);
    let diff = l_v.sub(&d_vw)?;
    let mut a = 0.0f64;
    let mut b = 0.0f64;
    for x in points {
        a = a.max(crate::forms::algebra::max_norm(&l_big.try_value(x)?));
        b = b.max(crate::forms::algebra::max_norm(&diff.try_value(x)?));
    }
    Ok((a, b))
}

/// Advects a 2-chain and tracks its vorticity flux; checks `L_ω Ω = 0`.
pub fn helmholtz_check(
    spec: &VectorFieldSpec,
    surface: &GeometricChain,
    t0: f64,
    t1: f64,
    points: &[Vec<f64>],
    opts: &InvariantOptions,
) -> Result<HelmholtzReport> {
    if surface.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: surface.degree(),
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let omega = if spec.is_steady() {
        vorticity_spatial(spec, t0)?
    } else {
        crate::kinematics::vorticity_form(spec)?
    };
    let invariant = invariant_report(&omega, spec, surface, t0, t1, opts)?;
    let (lie_omega_max, lie_omega_v_max) = vortex_line_lie_residuals(spec, t0, points)?;
    let checks = vec![
        drift_check("flux_drift", &invariant),
        NamedCheck::below("lie_omega_Omega", lie_omega_max, LIE_TOLERANCE),
        NamedCheck::below("lie_omega_v_exact", lie_omega_v_max, LIE_TOLERANCE),
        invariant.checks[0].clone(),
    ];
    Ok(HelmholtzReport {
        invariant,
        lie_omega_max,
        lie_omega_v_max,
        checks,
    })
}
