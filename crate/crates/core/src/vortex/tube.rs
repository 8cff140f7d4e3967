//! Vortex tubes swept along vortex lines.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{sharp, Exclusion, FormField, MultiVectorField, DEFAULT_STEP};
use crate::integrate::{advect_chain, swept_chain, Flow, GeometricChain};
use crate::kinematics::{vorticity_spatial, vorticity_vector, VectorFieldSpec};

/// Relative agreement required between the two cap fluxes.
pub const TUBE_TOLERANCE: f64 = 1e-6;

/// Smallest `|ω|` accepted on a cap node.
const MIN_VORTICITY: f64 = 1e-10;

/// A planar flow as a 3D flow independent of `z` with no vertical velocity.
///
/// Point exclusions become vertical lines.
pub fn extrude(spec: &VectorFieldSpec) -> Result<VectorFieldSpec> {
    if spec.dim() != 2 {
        return Err(Error::Precondition(format!(
            "extrusion needs a planar flow, got dimension {}",
            spec.dim()
        )));
    }
    let inner = spec.clone();
    let exclusions = spec
        .exclusions()
        .iter()
        .map(|e| {
            let a = e.anchor();
            let mut out = Exclusion::line(
                &e.label,
                vec![a[0], a[1], 0.0],
                vec![0.0, 0.0, 1.0],
                e.radius,
            );
            out.strength = e.strength;
            out
        })
        .collect();
    Ok(VectorFieldSpec::new(3, spec.is_steady(), move |t, x| {
        let v = inner.velocity(t, &x[..2]);
        vec![v[0], v[1], 0.0]
    })
    .with_exclusions(exclusions))
}

/// Unit-speed flow along the vorticity vector at a frozen time.
#[derive(Clone, Debug)]
pub struct VortexLineFlow {
    omega: MultiVectorField,
    exclusions: Vec<Exclusion>,
}

impl VortexLineFlow {
    pub fn new(spec: &VectorFieldSpec, t: f64) -> Result<Self> {
        Ok(VortexLineFlow {
            omega: vorticity_vector(spec, t)?,
            exclusions: spec.exclusions().to_vec(),
        })
    }

    fn direction(&self, x: &[f64]) -> Vec<f64> {
        let w = self.omega.value(x);
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        w.into_iter().map(|a| a / norm).collect()
    }
}

impl Flow for VortexLineFlow {
    fn dim(&self) -> usize {
        self.omega.dim()
    }

    fn velocity(&self, _t: f64, x: &[f64]) -> Vec<f64> {
        self.direction(x)
    }

    fn jacobian(&self, _t: f64, x: &[f64]) -> Vec<Vec<f64>> {
        let h = DEFAULT_STEP;
        (0..x.len())
            .map(|j| {
                let mut p = x.to_vec();
                let mut at = |m: f64| {
                    p[j] = x[j] + m * h;
                    self.direction(&p)
                };
                let (a, b, c, d) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
                (0..x.len())
                    .map(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h))
                    .collect()
            })
            .collect()
    }

    fn excluded(&self, x: &[f64]) -> Option<String> {
        self.exclusions
            .iter()
            .find(|e| e.contains(x))
            .map(|e| e.label.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VortexTube {
    #[serde(skip)]
    pub swept: Option<GeometricChain>,
    #[serde(skip)]
    pub cap_end: Option<GeometricChain>,
    pub length: f64,
    /// `∫ Ω` over the seed and end caps.
    pub form_flux: [f64; 2],
    /// `∫ ω · n dA` over the seed and end caps.
    pub vector_flux: [f64; 2],
    /// Mean of the two form fluxes.
    pub strength: f64,
    pub relative_mismatch: f64,
    /// Flux integrand keeps one sign over every cap node.
    pub transverse: [bool; 2],
}

impl VortexTube {
    pub fn passed(&self) -> bool {
        self.relative_mismatch < TUBE_TOLERANCE && self.transverse[0] && self.transverse[1]
    }
}

fn integrand_signs(cap: &GeometricChain, form: &FormField, order: usize) -> Result<bool> {
    let mut pos = false;
    let mut neg = false;
    for (a, cube) in cap.terms() {
        for (s, _) in crate::integrate::tensor_nodes(order, 2) {
            let v = a * cube.integrand(form, &s)?;
            pos |= v > 0.0;
            neg |= v < 0.0;
        }
    }
    Ok(!(pos && neg))
}

/// Sweeps `cap` a distance `length` along vortex lines of `spec` at time `t`.
pub fn vortex_tube(
    spec: &VectorFieldSpec,
    cap: &GeometricChain,
    length: f64,
    t: f64,
    steps: usize,
    order: usize,
) -> Result<VortexTube> {
    if spec.dim() != 3 {
        return Err(Error::Precondition("vortex tubes need a 3D flow".into()));
    }
    if cap.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: cap.degree(),
        });
    }
    let omega = vorticity_vector(spec, t)?;
    for x in cap.node_points(order)? {
        let w = omega.try_value(&x)?;
        if w.iter().map(|a| a * a).sum::<f64>().sqrt() < MIN_VORTICITY {
            return Err(Error::DegenerateTube(format!(
                "vorticity vanishes at {x:?}"
            )));
        }
    }
    let flow: Arc<dyn Flow> = Arc::new(VortexLineFlow::new(spec, t)?);
    let family = advect_chain(cap, flow, 0.0, length, steps, order)?;
    let swept = swept_chain(&family)?;
    let end = family
        .snapshots
        .last()
        .cloned()
        .expect("at least one snapshot");
    let big = vorticity_spatial(spec, t)?;
    let vec_form = sharp(&omega);
    let form_flux = [cap.integrate(&big, order)?, end.integrate(&big, order)?];
    let vector_flux = [
        cap.integrate(&vec_form, order)?,
        end.integrate(&vec_form, order)?,
    ];
    let strength = 0.5 * (form_flux[0] + form_flux[1]);
    let relative_mismatch = (form_flux[0] - form_flux[1]).abs() / form_flux[0].abs().max(1e-300);
    let transverse = [
        integrand_signs(cap, &big, order)?,
        integrand_signs(&end, &big, order)?,
    ];
    Ok(VortexTube {
        swept: Some(swept),
        cap_end: Some(end),
        length,
        form_flux,
        vector_flux,
        strength,
        relative_mismatch,
        transverse,
    })
}
