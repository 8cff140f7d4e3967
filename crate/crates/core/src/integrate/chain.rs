use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cube::SingularCube;
use crate::error::{Error, Result};
use crate::forms::{algebra, FormField};

/// A formal real combination of singular cubes of one degree.
#[derive(Clone, Debug)]
pub struct GeometricChain {
    degree: usize,
    ambient: usize,
    terms: Vec<(f64, SingularCube)>,
}

impl GeometricChain {
    pub fn empty(degree: usize, ambient: usize) -> Self {
        GeometricChain {
            degree,
            ambient,
            terms: Vec::new(),
        }
    }

    pub fn single(cube: SingularCube) -> Self {
        GeometricChain {
            degree: cube.degree(),
            ambient: cube.ambient(),
            terms: vec![(1.0, cube)],
        }
    }

    pub fn from_terms(terms: Vec<(f64, SingularCube)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Structural("chain needs at least one term".into()))?;
        let mut c = GeometricChain::empty(first.1.degree(), first.1.ambient());
        for (a, cube) in terms {
            c.push(a, cube)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, coeff: f64, cube: SingularCube) -> Result<()> {
        if cube.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: cube.degree(),
            });
        }
        if cube.ambient() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: cube.ambient(),
            });
        }
        if coeff != 0.0 {
            self.terms.push((coeff, cube));
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn terms(&self) -> &[(f64, SingularCube)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        GeometricChain {
            degree: self.degree,
            ambient: self.ambient,
            terms: self
                .terms
                .iter()
                .filter(|_| s != 0.0)
                .map(|(a, c)| (a * s, c.clone()))
                .collect(),
        }
    }

    /// Formal sum; terms are concatenated, not merged.
    pub fn plus(&self, other: &GeometricChain) -> Result<Self> {
        let mut c = self.clone();
        for (a, cube) in &other.terms {
            c.push(*a, cube.clone())?;
        }
        Ok(c)
    }

    pub fn minus(&self, other: &GeometricChain) -> Result<Self> {
        self.plus(&other.scaled(-1.0))
    }

    /// `∫_c α`, summed in term order.
    pub fn integrate(&self, alpha: &FormField, order: usize) -> Result<f64> {
        if order < 2 && self.degree > 0 {
            return Err(Error::Numeric(format!(
                "quadrature order must be at least 2, got {order}"
            )));
        }
        if alpha.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: alpha.degree(),
            });
        }
        let parts: Vec<Result<f64>> = self
            .terms
            .par_iter()
            .map(|(a, cube)| cube.integrate(alpha, order).map(|v| a * v))
            .collect();
        let mut total = 0.0;
        for p in parts {
            total += p?;
        }
        Ok(total)
    }

    /// Geometric boundary: signed faces of every cube.
    pub fn boundary(&self) -> Result<GeometricChain> {
        if self.degree == 0 {
            return Err(Error::DegreeUnderflow { min: 1, found: 0 });
        }
        let mut out = GeometricChain::empty(self.degree - 1, self.ambient);
        for (a, cube) in &self.terms {
            for (s, face) in cube.faces()? {
                out.push(a * s, face)?;
            }
        }
        Ok(out)
    }

    /// Splits every cube into `m^k` congruent sub-cubes.
    pub fn subdivided(&self, m: usize) -> Result<GeometricChain> {
        let mut out = GeometricChain::empty(self.degree, self.ambient);
        let w = 1.0 / m as f64;
        let k = self.degree;
        for (a, cube) in &self.terms {
            for flat in 0..m.pow(k as u32) {
                let mut lo = vec![0.0; k];
                let mut f = flat;
                for slot in (0..k).rev() {
                    lo[slot] = (f % m) as f64 * w;
                    f /= m;
                }
                out.push(*a, cube.restrict(&lo, w)?)?;
            }
        }
        Ok(out)
    }

    /// Whether the chain has (numerically) zero boundary.
    ///
    /// Degree 1 cancels boundary points within `tol`; higher degrees pair
    /// the boundary against seeded random polynomial forms.
    pub fn is_cycle(&self, tol: f64) -> Result<bool> {
        match self.degree {
            0 => Ok(true),
            1 => Ok(self.endpoint_gap()? <= tol),
            k => {
                let b = self.boundary()?;
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c7c1e);
                let n = self.ambient;
                for _ in 0..4 {
                    let alpha = random_polynomial_form(n, k - 1, &mut rng);
                    let v = b.integrate(&alpha, 8)?;
                    if v.abs() > tol {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Largest endpoint mismatch of a 1-chain (zero for an exactly closed loop).
    pub fn endpoint_gap(&self) -> Result<f64> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: self.degree,
            });
        }
        let mut pts: Vec<(Vec<f64>, f64)> = Vec::new();
        for (a, cube) in &self.terms {
            pts.push((cube.point(&[1.0])?, *a));
            pts.push((cube.point(&[0.0])?, -a));
        }
        // Cluster coincident endpoints. A balanced cluster contributes its
        // spread; an unbalanced one the distance to the nearest other endpoint.
        let mut cluster = vec![usize::MAX; pts.len()];
        let mut reps: Vec<usize> = Vec::new();
        for i in 0..pts.len() {
            if let Some(c) = reps.iter().position(|&r| dist(&pts[r].0, &pts[i].0) < 1e-6) {
                cluster[i] = c;
            } else {
                cluster[i] = reps.len();
                reps.push(i);
            }
        }
        let mut worst = 0.0f64;
        for (c, &r) in reps.iter().enumerate() {
            let members: Vec<usize> = (0..pts.len()).filter(|&i| cluster[i] == c).collect();
            let weight: f64 = members.iter().map(|&i| pts[i].1).sum();
            let scale: f64 = members.iter().map(|&i| pts[i].1.abs()).sum();
            if weight.abs() <= 1e-12 * scale.max(1.0) {
                let spread = members
                    .iter()
                    .map(|&i| dist(&pts[r].0, &pts[i].0))
                    .fold(0.0, f64::max);
                worst = worst.max(spread);
            } else {
                let nearest = (0..pts.len())
                    .filter(|&i| cluster[i] != c)
                    .map(|i| dist(&pts[r].0, &pts[i].0))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(nearest);
            }
        }
        Ok(worst)
    }

    /// Every quadrature node image, in term order.
    pub fn node_points(&self, order: usize) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::new();
        for (_, cube) in &self.terms {
            for (_, _, x, _) in cube.sample(order)? {
                out.push(x);
            }
        }
        Ok(out)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `∫_c α` at the given quadrature order.
pub fn integrate(alpha: &FormField, c: &GeometricChain, order: usize) -> Result<f64> {
    c.integrate(alpha, order)
}

/// A degree-`k` form whose components are random quadratics.
pub fn random_polynomial_form(n: usize, k: usize, rng: &mut impl Rng) -> FormField {
    let len = algebra::binomial(n, k);
    let coeffs: Vec<Vec<f64>> = (0..len)
        .map(|_| {
            (0..1 + n + n * n)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    let c2 = coeffs.clone();
    FormField::new(n, k, move |x| {
        coeffs.iter().map(|c| quad(n, c, x)).collect()
    })
    .with_jacobian(move |x| {
        (0..n)
            .map(|s| c2.iter().map(|c| quad_partial(n, c, x, s)).collect())
            .collect()
    })
}

fn quad(n: usize, c: &[f64], x: &[f64]) -> f64 {
    let mut v = c[0];
    for i in 0..n {
        v += c[1 + i] * x[i];
        for j in 0..n {
            v += c[1 + n + i * n + j] * x[i] * x[j];
        }
    }
    v
}

fn quad_partial(n: usize, c: &[f64], x: &[f64], s: usize) -> f64 {
    let mut v = c[1 + s];
    for j in 0..n {
        v += c[1 + n + s * n + j] * x[j] + c[1 + n + j * n + s] * x[j];
    }
    v
}
