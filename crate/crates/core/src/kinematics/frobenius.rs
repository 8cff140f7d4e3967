//! Integrability of the Pfaff problem `v = 0` via the sequence
//! `I₀ = v, I₁ = dv, I₂ = v∧dv, I₃ = dv∧dv, I₄ = v∧dv∧dv`.

use serde::{Deserialize, Serialize};

use super::{covelocity, VectorFieldSpec};
use crate::error::{Error, Result};
use crate::forms::{algebra, exterior_derivative, wedge, FormField};

/// A form counts as globally vanishing when its max norm stays below this.
pub const FROBENIUS_TOLERANCE: f64 = 1e-7;

const NAMES: [&str; 5] = ["v", "dv", "v^dv", "dv^dv", "v^dv^dv"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusReport {
    /// Number of exterior-algebra slots: `n` for steady flow, `n + 1` otherwise.
    pub slots: usize,
    pub sample_count: usize,
    /// Max component norm of `I₀ … I₄` over the samples.
    pub max_norms: Vec<f64>,
    pub first_vanishing_index: Option<usize>,
    pub degree_of_integrability: Option<usize>,
    pub surface_orthogonal: bool,
    /// Every form after the first vanishing one also vanishes on samples.
    pub consistent: bool,
}

impl FrobeniusReport {
    pub fn completely_integrable(&self) -> bool {
        self.surface_orthogonal
    }

    pub fn name(j: usize) -> &'static str {
        NAMES[j]
    }
}

fn sequence(v: &FormField) -> Result<Vec<Option<FormField>>> {
    let slots = v.dim();
    let dv = exterior_derivative(v);
    let fits = |deg: usize| deg <= slots;
    let i2 = if fits(3) { Some(wedge(v, &dv)?) } else { None };
    let i3 = if fits(4) {
        Some(wedge(&dv, &dv)?)
    } else {
        None
    };
    let i4 = match (&i3, fits(5)) {
        (Some(i3), true) => Some(wedge(v, i3)?),
        _ => None,
    };
    Ok(vec![Some(v.clone()), Some(dv), i2, i3, i4])
}

/// Evaluates the sequence on spatial sample points at the given times.
///
/// Steady flow uses the spatial covelocity on `n` slots; unsteady flow the
/// full covelocity on `(t, x)`. Forms of degree above the slot count are zero.
pub fn frobenius_classify(
    spec: &VectorFieldSpec,
    points: &[Vec<f64>],
    times: &[f64],
) -> Result<FrobeniusReport> {
    if points.is_empty() || times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let full = covelocity(spec)?;
    let steady = spec.is_steady();
    let (v, samples): (FormField, Vec<Vec<f64>>) = if steady {
        (full.at_time(times[0]), points.to_vec())
    } else {
        let mut s = Vec::with_capacity(points.len() * times.len());
        for &t in times {
            for x in points {
                let mut p = vec![t];
                p.extend_from_slice(x);
                s.push(p);
            }
        }
        (full, s)
    };
    let slots = v.dim();
    let forms = sequence(&v)?;
    let mut max_norms = Vec::with_capacity(5);
    for f in &forms {
        let m = match f {
            None => 0.0,
            Some(f) if f.is_identically_zero() => 0.0,
            Some(f) => {
                let mut worst = 0.0f64;
                for p in &samples {
                    worst = worst.max(algebra::max_norm(&f.try_value(p)?));
                }
                worst
            }
        };
        max_norms.push(m);
    }
    let vanishes = |j: usize| max_norms[j] < FROBENIUS_TOLERANCE;
    let first = (0..5).find(|&j| vanishes(j));
    let consistent = match first {
        Some(j) => (j..5).all(vanishes),
        None => true,
    };
    Ok(FrobeniusReport {
        slots,
        sample_count: samples.len(),
        first_vanishing_index: first,
        degree_of_integrability: first.map(|j| slots - j.div_ceil(2)),
        surface_orthogonal: vanishes(2),
        consistent,
        max_norms,
    })
}
