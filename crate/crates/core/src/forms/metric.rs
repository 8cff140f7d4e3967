use std::sync::Arc;

use nalgebra::DMatrix;

use super::field::{EvalFn, Field, FormField, MultiVectorField};
use crate::error::{Error, Result};

pub type MatrixFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A Riemannian metric `g_ij` sampled pointwise as a row-major `n×n` array.
#[derive(Clone)]
pub struct Metric {
    n: usize,
    g: Option<MatrixFn>,
}

impl std::fmt::Debug for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Metric")
            .field("n", &self.n)
            .field("euclidean", &self.g.is_none())
            .finish()
    }
}

impl Metric {
    pub fn euclidean(n: usize) -> Self {
        Metric { n, g: None }
    }

    pub fn new(n: usize, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Metric {
            n,
            g: Some(Arc::new(g)),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_euclidean(&self) -> bool {
        self.g.is_none()
    }

    pub fn matrix(&self, x: &[f64]) -> Vec<f64> {
        match &self.g {
            Some(g) => g(x),
            None => {
                let mut m = vec![0.0; self.n * self.n];
                for i in 0..self.n {
                    m[i * self.n + i] = 1.0;
                }
                m
            }
        }
    }

    /// Inverse matrix `g^ij`; fails when the sample is singular.
    pub fn inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = DMatrix::from_row_slice(self.n, self.n, &self.matrix(x));
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::Numeric(format!("metric not invertible at {x:?}")))?;
        Ok(inv.transpose().as_slice().to_vec())
    }

    /// Checks symmetry and positive-definiteness at the given points.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<()> {
        for p in points {
            let raw = self.matrix(p);
            let m = DMatrix::from_row_slice(self.n, self.n, &raw);
            if (&m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) {
                return Err(Error::Numeric(format!("metric not symmetric at {p:?}")));
            }
            if m.cholesky().is_none() {
                return Err(Error::Numeric(format!(
                    "metric not positive-definite at {p:?}"
                )));
            }
        }
        Ok(())
    }
}

fn mat_vec(n: usize, m: &[f64], v: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
        .collect()
}

/// `v_i = g_ij v^j`.
pub fn lower(v: &MultiVectorField, g: &Metric) -> Result<FormField> {
    if v.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: v.degree(),
        });
    }
    if v.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: v.dim(),
        });
    }
    if g.is_euclidean() {
        return Ok(FormField(v.0.clone()));
    }
    let n = g.dim();
    let ev = v.0.eval_fn().clone();
    let g1 = g.clone();
    let e: EvalFn = Arc::new(move |x| mat_vec(n, &g1.matrix(x), &ev(x)));
    Ok(FormField(
        Field::from_parts(n, 1, e, None, v.0.domain().clone()).with_step(v.0.step()),
    ))
}

/// `v^i = g^ij v_j`; singular samples evaluate to NaN and fail `try_value`.
pub fn raise(alpha: &FormField, g: &Metric) -> Result<MultiVectorField> {
    if alpha.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: alpha.degree(),
        });
    }
    if alpha.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: alpha.dim(),
        });
    }
    if g.is_euclidean() {
        return Ok(MultiVectorField(alpha.0.clone()));
    }
    let n = g.dim();
    let ea = alpha.0.eval_fn().clone();
    let g1 = g.clone();
    let e: EvalFn = Arc::new(move |x| match g1.inverse(x) {
        Ok(inv) => mat_vec(n, &inv, &ea(x)),
        Err(_) => vec![f64::NAN; n],
    });
    Ok(MultiVectorField(
        Field::from_parts(n, 1, e, None, alpha.0.domain().clone()).with_step(alpha.0.step()),
    ))
}

/// A volume form `ρ dx¹∧…∧dxⁿ` with positive density.
#[derive(Clone)]
pub struct VolumeElement {
    n: usize,
    density: Option<MatrixFn>,
}

impl std::fmt::Debug for VolumeElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VolumeElement")
            .field("n", &self.n)
            .field("unit", &self.density.is_none())
            .finish()
    }
}

impl VolumeElement {
    pub fn unit(n: usize) -> Self {
        VolumeElement { n, density: None }
    }

    pub fn with_density(n: usize, rho: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        VolumeElement {
            n,
            density: Some(Arc::new(move |x| vec![rho(x)])),
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.density.as_ref().map_or(1.0, |d| d(x)[0])
    }

    pub fn form(&self) -> FormField {
        match &self.density {
            None => FormField::volume(self.n),
            Some(d) => {
                let d = d.clone();
                FormField::new(self.n, self.n, move |x| d(x))
            }
        }
    }

    /// `#A = i_A V` with this volume element.
    pub fn sharp(&self, a: &MultiVectorField) -> FormField {
        let base = super::ops::sharp(a);
        match &self.density {
            None => base,
            Some(d) => {
                let rho = FormField(Field::from_parts(
                    self.n,
                    0,
                    d.clone(),
                    None,
                    Default::default(),
                ));
                super::ops::scale_by(&rho, &base).expect("0-form scaling")
            }
        }
    }

    /// `#⁻¹α` with this volume element.
    pub fn sharp_inverse(&self, alpha: &FormField) -> MultiVectorField {
        let base = super::ops::sharp_inverse(alpha);
        match &self.density {
            None => base,
            Some(d) => {
                let d = d.clone();
                let inv: EvalFn = Arc::new(move |x| vec![1.0 / d(x)[0]]);
                let rho_inv =
                    FormField(Field::from_parts(self.n, 0, inv, None, Default::default()));
                super::ops::scale_multivector(&rho_inv, &base).expect("0-form scaling")
            }
        }
    }
}
