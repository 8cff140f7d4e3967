use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, Domain, FormField};
use crate::kinematics::VectorFieldSpec;

pub const DEFAULT_ATOL: f64 = 1e-8;
pub const DEFAULT_RTOL: f64 = 1e-6;

/// Mixed tolerance `atol + rtol·|scale|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            atol: DEFAULT_ATOL,
            rtol: DEFAULT_RTOL,
        }
    }
}

impl Tolerance {
    pub fn bound(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale.abs()
    }
}

pub type EquationOfState = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Predicate selecting spatial sample points that grid sweeps may use.
pub type SampleMask = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A 0-form on the spacetime slots `(t, x)`.
pub fn spacetime_scalar(
    n: usize,
    spec: &VectorFieldSpec,
    f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
) -> FormField {
    FormField::new(n + 1, 0, move |p| vec![f(p[0], &p[1..])])
        .with_domain(Domain::spacetime(spec.exclusions().to_vec()))
}

/// Velocity together with density, pressure and external force.
///
/// Scalars and the force are spacetime fields on `(t, x)`; the force is a
/// force density (per unit volume).
#[derive(Clone)]
pub struct FluidState {
    pub spec: VectorFieldSpec,
    pub density: FormField,
    pub pressure: Option<FormField>,
    pub force: Option<FormField>,
    pub potential: Option<FormField>,
    pub eos: Option<EquationOfState>,
    pub tolerance: Tolerance,
    /// Extra sample mask, e.g. to keep stencils off a piecewise seam.
    pub mask: Option<SampleMask>,
}

impl std::fmt::Debug for FluidState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FluidState")
            .field("dim", &self.spec.dim())
            .field("pressure", &self.pressure.is_some())
            .field("force", &self.force.is_some())
            .field("potential", &self.potential.is_some())
            .field("eos", &self.eos.is_some())
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

fn check_scalar(name: &str, f: &FormField, n: usize) -> Result<()> {
    if f.degree() != 0 || f.dim() != n + 1 {
        return Err(Error::Precondition(format!(
            "{name} must be a 0-form on {} spacetime slots",
            n + 1
        )));
    }
    Ok(())
}

impl FluidState {
    pub fn new(spec: VectorFieldSpec, density: FormField) -> Result<Self> {
        check_scalar("density", &density, spec.dim())?;
        Ok(FluidState {
            spec,
            density,
            pressure: None,
            force: None,
            potential: None,
            eos: None,
            tolerance: Tolerance::default(),
            mask: None,
        })
    }

    /// Constant density `ρ₀`.
    pub fn incompressible(spec: VectorFieldSpec, rho: f64) -> Self {
        let n = spec.dim();
        let density = spacetime_scalar(n, &spec, move |_, _| rho);
        FluidState::new(spec, density).expect("scalar density")
    }

    pub fn with_pressure(mut self, pressure: FormField) -> Result<Self> {
        check_scalar("pressure", &pressure, self.spec.dim())?;
        self.pressure = Some(pressure);
        Ok(self)
    }

    pub fn with_force(mut self, force: FormField) -> Result<Self> {
        let n = self.spec.dim();
        if force.degree() != 1 || force.dim() != n + 1 {
            return Err(Error::Precondition(format!(
                "force must be a 1-form on {} spacetime slots",
                n + 1
            )));
        }
        self.force = Some(force);
        Ok(self)
    }

    /// Potential `U`; when no force is set the force becomes `−dU`.
    pub fn with_potential(mut self, potential: FormField) -> Result<Self> {
        check_scalar("potential", &potential, self.spec.dim())?;
        if self.force.is_none() {
            self.force = Some(exterior_derivative(&potential).scaled(-1.0));
        }
        self.potential = Some(potential);
        Ok(self)
    }

    pub fn with_eos(mut self, eos: EquationOfState) -> Self {
        self.eos = Some(eos);
        self
    }

    pub fn with_mask(mut self, mask: SampleMask) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn has_conservative_force(&self) -> bool {
        self.force.is_none() || self.potential.is_some()
    }

    pub fn pressure(&self) -> Result<&FormField> {
        self.pressure
            .as_ref()
            .ok_or_else(|| Error::Precondition("no pressure field".into()))
    }

    /// Force density components `(F₀, F₁, …)` at `(t, x)`; zero when unset.
    pub fn force_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        match &self.force {
            Some(f) => f.try_value(p),
            None => Ok(vec![0.0; self.dim() + 1]),
        }
    }

    /// Checks `ρ > 0` and `F + dU ≈ 0` on samples.
    pub fn validate(&self, points: &[Vec<f64>], times: &[f64]) -> Result<()> {
        let du = self.potential.as_ref().map(exterior_derivative);
        for &t in times {
            for x in points {
                let p = super::tx(t, x);
                let rho = self.density.try_value(&p)?[0];
                if rho <= 0.0 {
                    return Err(Error::Precondition(format!(
                        "density {rho} is not positive at {x:?}, t = {t}"
                    )));
                }
                if let (Some(du), Some(f)) = (&du, &self.force) {
                    let a = du.try_value(&p)?;
                    let b = f.try_value(&p)?;
                    let gap = a
                        .iter()
                        .zip(&b)
                        .map(|(u, v)| (u + v).abs())
                        .fold(0.0, f64::max);
                    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
                    if gap > 1e-10 * (1.0 + scale) {
                        return Err(Error::Precondition(format!(
                            "force differs from -dU by {gap:e} at {x:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
