//! Stokes residuals and closed/exact classification by probe integrals.

use serde::{Deserialize, Serialize};

use super::chain::GeometricChain;
use crate::complex::{Cochain, CubicalComplex};
use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, FormField};

/// Both sides of Stokes' theorem for one (form, chain) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesReport {
    pub boundary_integral: f64,
    pub interior_integral: f64,
    pub residual: f64,
}

impl StokesReport {
    /// Residual relative to `1 + |∫_c dα|`.
    pub fn relative(&self) -> f64 {
        self.residual / (1.0 + self.interior_integral.abs())
    }
}

/// `∫_{∂c} α` against `∫_c dα`.
pub fn stokes(alpha: &FormField, c: &GeometricChain, order: usize) -> Result<StokesReport> {
    if alpha.degree() + 1 != c.degree() {
        return Err(Error::DegreeMismatch {
            expected: c.degree().saturating_sub(1),
            found: alpha.degree(),
        });
    }
    let boundary_integral = c.boundary()?.integrate(alpha, order)?;
    let da = exterior_derivative(alpha);
    let interior_integral = if da.is_identically_zero() {
        0.0
    } else {
        c.integrate(&da, order)?
    };
    Ok(StokesReport {
        boundary_integral,
        interior_integral,
        residual: (boundary_integral - interior_integral).abs(),
    })
}

/// `|∫_{∂c} α − ∫_c dα|`.
pub fn stokes_residual(alpha: &FormField, c: &GeometricChain, order: usize) -> Result<f64> {
    stokes(alpha, c, order).map(|r| r.residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Cycle,
    Boundary,
}

#[derive(Clone, Debug)]
pub struct Probe {
    pub label: String,
    pub kind: ProbeKind,
    pub chain: GeometricChain,
}

impl Probe {
    pub fn cycle(label: &str, chain: GeometricChain) -> Self {
        Probe {
            label: label.into(),
            kind: ProbeKind::Cycle,
            chain,
        }
    }

    pub fn boundary(label: &str, chain: GeometricChain) -> Self {
        Probe {
            label: label.into(),
            kind: ProbeKind::Boundary,
            chain,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeValue {
    pub label: String,
    pub kind: ProbeKind,
    pub value: f64,
}

/// Closed/exact verdict; `None` when no probe of the needed kind was given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeRhamClass {
    pub closed: Option<bool>,
    pub exact: Option<bool>,
    pub inconclusive: bool,
    pub probes: Vec<ProbeValue>,
}

/// Classifies `α` from its integrals over boundary and cycle probes.
pub fn derham_classify(
    alpha: &FormField,
    probes: &[Probe],
    tol: f64,
    order: usize,
) -> Result<DeRhamClass> {
    let mut values = Vec::with_capacity(probes.len());
    for p in probes {
        values.push(ProbeValue {
            label: p.label.clone(),
            kind: p.kind,
            value: p.chain.integrate(alpha, order)?,
        });
    }
    let small = |kind: ProbeKind| -> Option<bool> {
        let mut it = values.iter().filter(|v| v.kind == kind).peekable();
        it.peek()?;
        Some(it.all(|v| v.value.abs() < tol))
    };
    let closed = small(ProbeKind::Boundary);
    let cycles = small(ProbeKind::Cycle);
    let exact = match (closed, cycles) {
        (Some(false), _) => Some(false),
        (Some(true), Some(c)) => Some(c),
        (None, Some(false)) => Some(false),
        _ => None,
    };
    Ok(DeRhamClass {
        closed,
        exact,
        inconclusive: closed.is_none() || exact.is_none(),
        probes: values,
    })
}

/// The cochain `σ ↦ ∫_σ α` on the realized cubes of a complex.
pub fn derham_cochain(
    alpha: &FormField,
    complex: &CubicalComplex,
    order: usize,
) -> Result<Cochain> {
    let k = alpha.degree();
    let mut out = Cochain::zero(k);
    if k > complex.dim() {
        return Ok(out);
    }
    for cube in complex.basis(k) {
        let geom = cube.geometry.as_ref().ok_or_else(|| {
            Error::Structural(format!("cube `{}` has no geometric realization", cube.id))
        })?;
        let v = GeometricChain::single(geom.as_ref().clone()).integrate(alpha, order)?;
        out.add_term(cube.id.clone(), v);
    }
    Ok(out)
}
