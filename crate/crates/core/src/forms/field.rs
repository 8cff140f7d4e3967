use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::algebra::{binomial, multi_indices, MAX_DIM};
use crate::error::{Error, Result};

pub type EvalFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Returns `jac[slot][component]`.
pub type JacFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExclusionShape {
    Point {
        center: Vec<f64>,
    },
    Line {
        point: Vec<f64>,
        direction: Vec<f64>,
    },
}

/// A deleted set of flow space: a puncture or a deleted axis, thickened by `radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub label: String,
    pub shape: ExclusionShape,
    pub radius: f64,
    /// Circulation carried by the deleted set, when declared.
    pub strength: Option<f64>,
}

impl Exclusion {
    pub fn point(label: &str, center: Vec<f64>, radius: f64) -> Self {
        Exclusion {
            label: label.to_string(),
            shape: ExclusionShape::Point { center },
            radius,
            strength: None,
        }
    }

    pub fn line(label: &str, point: Vec<f64>, direction: Vec<f64>, radius: f64) -> Self {
        let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        Exclusion {
            label: label.to_string(),
            shape: ExclusionShape::Line {
                point,
                direction: direction.iter().map(|d| d / norm).collect(),
            },
            radius,
            strength: None,
        }
    }

    pub fn with_strength(mut self, strength: f64) -> Self {
        self.strength = Some(strength);
        self
    }

    /// Distance from a spatial point to the deleted set.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            ExclusionShape::Point { center } => x
                .iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            ExclusionShape::Line { point, direction } => {
                let r: Vec<f64> = x.iter().zip(point).map(|(a, b)| a - b).collect();
                let along: f64 = r.iter().zip(direction).map(|(a, b)| a * b).sum();
                r.iter()
                    .zip(direction)
                    .map(|(a, d)| (a - along * d).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance(x) < self.radius
    }

    /// Center of a point exclusion projected to the plane, or the line's anchor.
    pub fn anchor(&self) -> &[f64] {
        match &self.shape {
            ExclusionShape::Point { center } => center,
            ExclusionShape::Line { point, .. } => point,
        }
    }
}

/// Where a field may be evaluated: slot layout plus deleted sets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Domain {
    /// Slot 0 is time when set.
    pub time_slot: bool,
    pub exclusions: Vec<Exclusion>,
}

impl Domain {
    pub fn spatial(exclusions: Vec<Exclusion>) -> Self {
        Domain {
            time_slot: false,
            exclusions,
        }
    }

    pub fn spacetime(exclusions: Vec<Exclusion>) -> Self {
        Domain {
            time_slot: true,
            exclusions,
        }
    }

    fn spatial_part<'a>(&self, x: &'a [f64]) -> &'a [f64] {
        if self.time_slot {
            &x[1..]
        } else {
            x
        }
    }

    pub fn excluded_by(&self, x: &[f64]) -> Option<&Exclusion> {
        let s = self.spatial_part(x);
        self.exclusions.iter().find(|e| e.contains(s))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.excluded_by(x).is_none()
    }

    /// Union of exclusion sets; slot layouts must agree.
    pub fn merge(&self, other: &Domain) -> Domain {
        let mut exclusions = self.exclusions.clone();
        for e in &other.exclusions {
            if !exclusions.contains(e) {
                exclusions.push(e.clone());
            }
        }
        Domain {
            time_slot: self.time_slot || other.time_slot,
            exclusions,
        }
    }
}

/// An antisymmetric tensor field on `dim` slots with `C(dim, degree)` components.
#[derive(Clone)]
pub struct Field {
    dim: usize,
    degree: usize,
    eval: EvalFn,
    jac: Option<JacFn>,
    step: f64,
    domain: Domain,
    zero: bool,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("analytic_jacobian", &self.jac.is_some())
            .field("step", &self.step)
            .field("domain", &self.domain)
            .field("identically_zero", &self.zero)
            .finish()
    }
}

impl Field {
    pub fn new(
        dim: usize,
        degree: usize,
        eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Field {
            dim,
            degree,
            eval: Arc::new(eval),
            jac: None,
            step: DEFAULT_STEP,
            domain: Domain::default(),
            zero: false,
        }
    }

    pub fn from_parts(
        dim: usize,
        degree: usize,
        eval: EvalFn,
        jac: Option<JacFn>,
        domain: Domain,
    ) -> Self {
        Field {
            dim,
            degree,
            eval,
            jac,
            step: DEFAULT_STEP,
            domain,
            zero: false,
        }
    }

    pub fn with_jacobian(
        mut self,
        jac: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.jac = Some(Arc::new(jac));
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.step = h;
        self
    }

    /// Drops the analytic jacobian so that partials come from finite differences.
    pub fn finite_difference(mut self) -> Self {
        self.jac = None;
        self
    }

    pub fn constant(dim: usize, degree: usize, comps: Vec<f64>) -> Self {
        assert_eq!(comps.len(), binomial(dim, degree));
        let len = comps.len();
        Field::new(dim, degree, move |_| comps.clone())
            .with_jacobian(move |_| vec![vec![0.0; len]; dim])
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        let mut f = Field::constant(dim, degree, vec![0.0; binomial(dim, degree)]);
        f.zero = true;
        f
    }

    /// The coordinate function `x^i` as a 0-form.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Field::new(dim, 0, move |x| vec![x[i]]).with_jacobian(move |_| {
            (0..dim)
                .map(|s| vec![if s == i { 1.0 } else { 0.0 }])
                .collect()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        binomial(self.dim, self.degree)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn has_time_slot(&self) -> bool {
        self.domain.time_slot
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    /// True for results known to vanish structurally (e.g. `d` of a top form).
    pub fn is_identically_zero(&self) -> bool {
        self.zero
    }

    pub(crate) fn mark_zero(mut self) -> Self {
        self.zero = true;
        self
    }

    pub(crate) fn eval_fn(&self) -> &EvalFn {
        &self.eval
    }

    pub(crate) fn jac_fn(&self) -> Option<&JacFn> {
        self.jac.as_ref()
    }

    pub fn indices(&self) -> &'static [Vec<usize>] {
        multi_indices(self.dim, self.degree)
    }

    /// Component array at `x`, unchecked.
    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    /// Component array at `x`; fails inside exclusions or on non-finite values.
    pub fn try_value(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let v = (self.eval)(x);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric(format!("non-finite field value at {x:?}")));
        }
        Ok(v)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if let Some(e) = self.domain.excluded_by(x) {
            return Err(Error::Excluded {
                point: x.to_vec(),
                zone: e.label.clone(),
            });
        }
        Ok(())
    }

    /// Partials `jac[slot][component]`, analytic when available.
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        match &self.jac {
            Some(j) => j(x),
            None => self.fd_jacobian(x),
        }
    }

    pub fn try_jacobian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_point(x)?;
        let j = self.jacobian(x);
        if j.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Numeric(format!("non-finite partials at {x:?}")));
        }
        Ok(j)
    }

    /// Fourth-order central differences; one-sided near exclusion zones.
    pub fn fd_jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim).map(|s| self.fd_partial(x, s)).collect()
    }

    pub fn fd_partial(&self, x: &[f64], slot: usize) -> Vec<f64> {
        let h = self.step;
        let mut p = x.to_vec();
        let mut at = |m: f64| {
            p[slot] = x[slot] + m * h;
            let v = (self.eval)(&p);
            p[slot] = x[slot];
            v
        };
        let clear = |ms: &[f64]| {
            ms.iter().all(|&m| {
                let mut q = x.to_vec();
                q[slot] += m * h;
                self.domain.contains(&q)
            })
        };
        let len = self.len();
        if self.domain.exclusions.is_empty() || clear(&[-2.0, -1.0, 1.0, 2.0]) {
            let (a, b, c, d) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            return (0..len)
                .map(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h))
                .collect();
        }
        let dir = if clear(&[1.0, 2.0, 3.0, 4.0]) {
            1.0
        } else if clear(&[-1.0, -2.0, -3.0, -4.0]) {
            -1.0
        } else {
            return vec![f64::NAN; len];
        };
        let f: Vec<Vec<f64>> = (0..5).map(|m| at(dir * m as f64)).collect();
        (0..len)
            .map(|i| {
                dir * (-25.0 * f[0][i] + 48.0 * f[1][i] - 36.0 * f[2][i] + 16.0 * f[3][i]
                    - 3.0 * f[4][i])
                    / (12.0 * h)
            })
            .collect()
    }

    /// Spot-checks stored components against a freshly computed array.
    pub fn component(&self, x: &[f64], idx: &[usize]) -> f64 {
        super::algebra::component(self.dim, &self.value(x), idx)
    }

    /// Restriction of a spacetime field to the slice `t = const`.
    ///
    /// Components carrying the time slot are dropped; for forms this is the
    /// pullback along the slice embedding.
    pub fn at_time(&self, t: f64) -> Field {
        if !self.domain.time_slot {
            return self.clone();
        }
        let n = self.dim - 1;
        let keep: Vec<usize> = multi_indices(self.dim, self.degree)
            .iter()
            .enumerate()
            .filter(|(_, idx)| !idx.contains(&0))
            .map(|(i, _)| i)
            .collect();
        let lift = move |x: &[f64]| {
            let mut p = Vec::with_capacity(x.len() + 1);
            p.push(t);
            p.extend_from_slice(x);
            p
        };
        let eval = self.eval.clone();
        let k1 = keep.clone();
        let e: EvalFn = Arc::new(move |x| {
            let v = eval(&lift(x));
            k1.iter().map(|&i| v[i]).collect()
        });
        let jac = self.jac.clone().map(|j| {
            let k2 = keep.clone();
            let f: JacFn = Arc::new(move |x| {
                let m = j(&lift(x));
                m[1..]
                    .iter()
                    .map(|row| k2.iter().map(|&i| row[i]).collect())
                    .collect()
            });
            f
        });
        let mut out = Field::from_parts(
            n,
            self.degree,
            e,
            jac,
            Domain::spatial(self.domain.exclusions.clone()),
        );
        out.step = self.step;
        out.zero = self.zero;
        out
    }

    /// Time-independent extension of a spatial field to spacetime slots.
    pub fn lift_time(&self) -> Field {
        if self.domain.time_slot {
            return self.clone();
        }
        let n1 = self.dim + 1;
        let map: Vec<usize> = multi_indices(self.dim, self.degree)
            .iter()
            .map(|idx| {
                let shifted: Vec<usize> = idx.iter().map(|i| i + 1).collect();
                super::algebra::index_of(n1, &shifted)
            })
            .collect();
        let len = binomial(n1, self.degree);
        let eval = self.eval.clone();
        let m1 = map.clone();
        let e: EvalFn = Arc::new(move |x| {
            let v = eval(&x[1..]);
            let mut out = vec![0.0; len];
            for (i, &o) in m1.iter().enumerate() {
                out[o] = v[i];
            }
            out
        });
        let jac = self.jac.clone().map(|j| {
            let f: JacFn = Arc::new(move |x| {
                let m = j(&x[1..]);
                let mut out = vec![vec![0.0; len]; n1];
                for (s, row) in m.iter().enumerate() {
                    for (i, &o) in map.iter().enumerate() {
                        out[s + 1][o] = row[i];
                    }
                }
                out
            });
            f
        });
        let mut out = Field::from_parts(
            n1,
            self.degree,
            e,
            jac,
            Domain::spacetime(self.domain.exclusions.clone()),
        );
        out.step = self.step;
        out.zero = self.zero;
        out
    }

    /// `Σ cᵢ fᵢ` for fields of equal shape.
    pub fn linear_combination(terms: &[(f64, &Field)]) -> Result<Field> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Structural("empty linear combination".into()))?
            .1;
        for (_, f) in terms {
            if f.dim != first.dim {
                return Err(Error::DimensionMismatch {
                    expected: first.dim,
                    found: f.dim,
                });
            }
            if f.degree != first.degree {
                return Err(Error::DegreeMismatch {
                    expected: first.degree,
                    found: f.degree,
                });
            }
        }
        let domain = terms
            .iter()
            .fold(first.domain.clone(), |d, (_, f)| d.merge(&f.domain));
        let len = first.len();
        let parts: Vec<(f64, EvalFn)> = terms.iter().map(|(c, f)| (*c, f.eval.clone())).collect();
        let eval: EvalFn = Arc::new(move |x| {
            let mut out = vec![0.0; len];
            for (c, e) in &parts {
                for (o, v) in out.iter_mut().zip(e(x)) {
                    *o += c * v;
                }
            }
            out
        });
        let jac = if terms.iter().all(|(_, f)| f.jac.is_some()) {
            let parts: Vec<(f64, JacFn)> = terms
                .iter()
                .map(|(c, f)| (*c, f.jac.clone().unwrap()))
                .collect();
            let dim = first.dim;
            let j: JacFn = Arc::new(move |x| {
                let mut out = vec![vec![0.0; len]; dim];
                for (c, j) in &parts {
                    for (orow, row) in out.iter_mut().zip(j(x)) {
                        for (o, v) in orow.iter_mut().zip(row) {
                            *o += c * v;
                        }
                    }
                }
                out
            });
            Some(j)
        } else {
            None
        };
        let mut out = Field::from_parts(first.dim, first.degree, eval, jac, domain);
        out.step = first.step;
        out.zero = terms.iter().all(|(_, f)| f.zero);
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field::linear_combination(&[(c, self)]).expect("single term")
    }

    /// Max-norm of the components over a set of points, skipping excluded ones.
    pub fn max_norm_on(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .filter(|p| self.domain.contains(p))
            .map(|p| super::algebra::max_norm(&self.value(p)))
            .fold(0.0, f64::max)
    }
}

macro_rules! typed_field {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, Debug)]
        pub struct $name(pub Field);

        impl $name {
            pub fn new(
                dim: usize,
                degree: usize,
                eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
            ) -> Self {
                $name(Field::new(dim, degree, eval))
            }

            pub fn with_jacobian(
                self,
                jac: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
            ) -> Self {
                $name(self.0.with_jacobian(jac))
            }

            pub fn with_domain(self, domain: Domain) -> Self {
                $name(self.0.with_domain(domain))
            }

            pub fn finite_difference(self) -> Self {
                $name(self.0.finite_difference())
            }

            pub fn constant(dim: usize, degree: usize, comps: Vec<f64>) -> Self {
                $name(Field::constant(dim, degree, comps))
            }

            pub fn zero(dim: usize, degree: usize) -> Self {
                $name(Field::zero(dim, degree))
            }

            pub fn field(&self) -> &Field {
                &self.0
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            pub fn degree(&self) -> usize {
                self.0.degree()
            }

            pub fn value(&self, x: &[f64]) -> Vec<f64> {
                self.0.value(x)
            }

            pub fn try_value(&self, x: &[f64]) -> Result<Vec<f64>> {
                self.0.try_value(x)
            }

            pub fn at_time(&self, t: f64) -> Self {
                $name(self.0.at_time(t))
            }

            pub fn lift_time(&self) -> Self {
                $name(self.0.lift_time())
            }

            pub fn scaled(&self, c: f64) -> Self {
                $name(self.0.scaled(c))
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                Field::linear_combination(&[(1.0, &self.0), (1.0, &other.0)]).map($name)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                Field::linear_combination(&[(1.0, &self.0), (-1.0, &other.0)]).map($name)
            }

            pub fn is_identically_zero(&self) -> bool {
                self.0.is_identically_zero()
            }
        }
    };
}

typed_field!(FormField, "A differential form `Σ α_I dx^I` on flat space.");
typed_field!(
    MultiVectorField,
    "A multivector field `Σ A^I ∂_I` on flat space."
);

impl FormField {
    /// A 0-form from a scalar function.
    pub fn scalar(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        FormField::new(dim, 0, move |x| vec![f(x)])
    }

    /// The volume form `dx¹∧…∧dxⁿ`.
    pub fn volume(dim: usize) -> Self {
        FormField::constant(dim, dim, vec![1.0])
    }
}

impl MultiVectorField {
    /// A vector field from its component function.
    pub fn vector(dim: usize, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        MultiVectorField::new(dim, 1, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_matches_polynomial_partials() {
        let f = Field::new(2, 0, |x| vec![x[0] * x[0] * x[1] + x[1].powi(3)]);
        let j = f.fd_jacobian(&[0.7, -1.3]);
        assert!((j[0][0] - 2.0 * 0.7 * -1.3).abs() < 1e-10);
        assert!((j[1][0] - (0.49 + 3.0 * 1.69)).abs() < 1e-10);
    }

    #[test]
    fn fd_flips_near_exclusion() {
        let dom = Domain::spatial(vec![Exclusion::point("p", vec![0.0, 0.0], 0.5)]);
        let f = Field::new(2, 0, |x| vec![x[0].powi(2)]).with_domain(dom);
        // Central stencil at x = 0.5001 would enter the disc.
        let j = f.fd_jacobian(&[0.5001, 0.0]);
        assert!((j[0][0] - 1.0002).abs() < 1e-8);
    }

    #[test]
    fn excluded_points_are_rejected() {
        let dom = Domain::spatial(vec![Exclusion::point("p", vec![0.0, 0.0], 0.2)]);
        let f = Field::constant(2, 1, vec![1.0, 0.0]).with_domain(dom);
        assert!(matches!(
            f.try_value(&[0.1, 0.0]),
            Err(Error::Excluded { .. })
        ));
        assert!(f.try_value(&[0.3, 0.0]).is_ok());
    }

    #[test]
    fn slice_drops_time_components() {
        // dt + 2 dx + 3 dy on (t, x, y)
        let f = Field::constant(3, 1, vec![1.0, 2.0, 3.0]).with_domain(Domain::spacetime(vec![]));
        assert_eq!(f.at_time(0.5).value(&[0.0, 0.0]), vec![2.0, 3.0]);
        let back = f.at_time(0.0).lift_time();
        assert_eq!(back.value(&[9.0, 0.0, 0.0]), vec![0.0, 2.0, 3.0]);
    }

    #[test]
    fn line_exclusion_distance() {
        let e = Exclusion::line("axis", vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 2.0], 0.1);
        assert!((e.distance(&[3.0, 4.0, 17.0]) - 5.0).abs() < 1e-12);
    }
}
