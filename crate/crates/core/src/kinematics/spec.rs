use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{Domain, EvalFn, Exclusion, Field, JacFn, Metric, MultiVectorField};

/// A velocity field `v = ∂_t + vⁱ(t, x) ∂_i` on flat flow space.
///
/// The field is stored on the `n + 1` spacetime slots `(t, x¹, …, xⁿ)` with
/// time component identically one.
#[derive(Clone, Debug)]
pub struct VectorFieldSpec {
    n: usize,
    steady: bool,
    velocity: MultiVectorField,
    metric: Metric,
}

impl VectorFieldSpec {
    /// From spatial components `v(t, x)`; partials by finite differences.
    pub fn new(
        n: usize,
        steady: bool,
        v: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        let eval: EvalFn = Arc::new(move |tx: &[f64]| {
            let mut out = Vec::with_capacity(tx.len());
            out.push(1.0);
            out.extend(v(tx[0], &tx[1..]));
            out
        });
        let field = Field::from_parts(n + 1, 1, eval, None, Domain::spacetime(Vec::new()));
        VectorFieldSpec {
            n,
            steady,
            velocity: MultiVectorField(field),
            metric: Metric::euclidean(n),
        }
    }

    /// A steady field `v(x)`.
    pub fn steady(n: usize, v: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        VectorFieldSpec::new(n, true, move |_, x| v(x))
    }

    /// From spatial components with analytic partials.
    ///
    /// `jac(t, x)` returns `[∂_t v, ∂_1 v, …, ∂_n v]`, each of length `n`.
    pub fn with_partials(
        n: usize,
        steady: bool,
        v: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
        jac: impl Fn(f64, &[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        let mut spec = VectorFieldSpec::new(n, steady, v);
        let j: JacFn = Arc::new(move |tx: &[f64]| {
            jac(tx[0], &tx[1..])
                .into_iter()
                .map(|row| {
                    let mut r = Vec::with_capacity(n + 1);
                    r.push(0.0);
                    r.extend(row);
                    r
                })
                .collect()
        });
        let f = &spec.velocity.0;
        spec.velocity = MultiVectorField(Field::from_parts(
            n + 1,
            1,
            f.eval_fn().clone(),
            Some(j),
            f.domain().clone(),
        ));
        spec
    }

    /// Wraps an existing spacetime vector field whose time component is one.
    pub fn from_spacetime(n: usize, steady: bool, velocity: MultiVectorField) -> Result<Self> {
        if velocity.dim() != n + 1 || velocity.degree() != 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: velocity.dim(),
            });
        }
        Ok(VectorFieldSpec {
            n,
            steady,
            velocity,
            metric: Metric::euclidean(n),
        })
    }

    pub fn with_exclusions(mut self, exclusions: Vec<Exclusion>) -> Self {
        self.velocity = MultiVectorField(
            self.velocity
                .0
                .clone()
                .with_domain(Domain::spacetime(exclusions)),
        );
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_steady(&self) -> bool {
        self.steady
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn exclusions(&self) -> &[Exclusion] {
        &self.velocity.0.domain().exclusions
    }

    pub fn excluded_by(&self, x: &[f64]) -> Option<&Exclusion> {
        self.exclusions().iter().find(|e| e.contains(x))
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        match self.excluded_by(x) {
            Some(e) => Err(Error::Excluded {
                point: x.to_vec(),
                zone: e.label.clone(),
            }),
            None => Ok(()),
        }
    }

    /// The spacetime vector field `∂_t + v`.
    pub fn spacetime_velocity(&self) -> &MultiVectorField {
        &self.velocity
    }

    /// The spatial field `v(t, ·)`.
    pub fn spatial_velocity(&self, t: f64) -> MultiVectorField {
        self.velocity.at_time(t)
    }

    fn tx(t: f64, x: &[f64]) -> Vec<f64> {
        let mut p = Vec::with_capacity(x.len() + 1);
        p.push(t);
        p.extend_from_slice(x);
        p
    }

    /// Spatial velocity components at `(t, x)`.
    pub fn velocity(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut v = self.velocity.value(&Self::tx(t, x));
        v.remove(0);
        v
    }

    /// `∂_j vⁱ` as `jac[j][i]` over spatial slots.
    pub fn spatial_jacobian(&self, t: f64, x: &[f64]) -> Vec<Vec<f64>> {
        let j = self.velocity.0.jacobian(&Self::tx(t, x));
        j[1..].iter().map(|row| row[1..].to_vec()).collect()
    }

    /// `∂_t vⁱ`.
    pub fn time_derivative(&self, t: f64, x: &[f64]) -> Vec<f64> {
        if self.steady {
            return vec![0.0; self.n];
        }
        let j = self.velocity.0.jacobian(&Self::tx(t, x));
        j[0][1..].to_vec()
    }

    /// Spot-checks time independence of a steady field.
    pub fn verify_steady(&self, points: &[Vec<f64>], times: &[f64]) -> Result<()> {
        for x in points {
            if self.excluded_by(x).is_some() {
                continue;
            }
            let v0 = self.velocity(times[0], x);
            for &t in &times[1..] {
                let v = self.velocity(t, x);
                let d = v
                    .iter()
                    .zip(&v0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if d > 1e-12 * (1.0 + v0.iter().map(|c| c.abs()).fold(0.0, f64::max)) {
                    return Err(Error::Declaration {
                        property: "steady".into(),
                        detail: format!("velocity changes by {d:e} at x = {x:?}"),
                    });
                }
            }
        }
        Ok(())
    }
}
