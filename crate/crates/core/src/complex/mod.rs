//! Finite cubical chain complexes with real coefficients.

mod cubical;
mod format;
pub mod golden;
mod linalg;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::SingularCube;

pub use cubical::{CubicalSet, ElementaryCube};
pub use format::{parse_complex, write_complex};
pub use linalg::{rank, PIVOT_TOLERANCE};

/// Relative residual below which a least-squares solve counts as exact.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CubeId(pub String);

impl CubeId {
    pub fn new(s: impl Into<String>) -> Self {
        CubeId(s.into())
    }
}

impl fmt::Display for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CubeId {
    fn from(s: &str) -> Self {
        CubeId(s.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct BasisCube {
    pub id: CubeId,
    pub degree: usize,
    pub geometry: Option<Arc<SingularCube>>,
}

/// A formal sum of basis cubes of one degree. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Chain {
    pub degree: usize,
    terms: BTreeMap<CubeId, f64>,
}

/// A linear functional on chains of one degree, stored like a chain.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    terms: BTreeMap<CubeId, f64>,
}

macro_rules! sparse_sum {
    ($name:ident) => {
        impl $name {
            pub fn zero(degree: usize) -> Self {
                $name {
                    degree,
                    terms: BTreeMap::new(),
                }
            }

            /// The basis element dual to or equal to `id`.
            pub fn basis(degree: usize, id: impl Into<CubeId>) -> Self {
                let mut c = Self::zero(degree);
                c.add_term(id, 1.0);
                c
            }

            pub fn from_terms<I, S>(degree: usize, terms: I) -> Self
            where
                I: IntoIterator<Item = (S, f64)>,
                S: Into<CubeId>,
            {
                let mut c = Self::zero(degree);
                for (id, a) in terms {
                    c.add_term(id, a);
                }
                c
            }

            pub fn add_term(&mut self, id: impl Into<CubeId>, coeff: f64) {
                let id = id.into();
                let e = self.terms.entry(id.clone()).or_insert(0.0);
                *e += coeff;
                if *e == 0.0 {
                    self.terms.remove(&id);
                }
            }

            pub fn coefficient(&self, id: &CubeId) -> f64 {
                self.terms.get(id).copied().unwrap_or(0.0)
            }

            pub fn terms(&self) -> impl Iterator<Item = (&CubeId, f64)> {
                self.terms.iter().map(|(k, v)| (k, *v))
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn is_empty(&self) -> bool {
                self.terms.is_empty()
            }

            /// Drops terms whose magnitude is at most `tol`.
            pub fn pruned(&self, tol: f64) -> Self {
                let mut c = Self::zero(self.degree);
                for (id, a) in &self.terms {
                    if a.abs() > tol {
                        c.terms.insert(id.clone(), *a);
                    }
                }
                c
            }

            pub fn scaled(&self, s: f64) -> Self {
                Self::from_terms(
                    self.degree,
                    self.terms.iter().map(|(k, v)| (k.clone(), s * v)),
                )
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                if self.degree != other.degree {
                    return Err(Error::DegreeMismatch {
                        expected: self.degree,
                        found: other.degree,
                    });
                }
                let mut c = self.clone();
                for (id, a) in &other.terms {
                    c.add_term(id.clone(), *a);
                }
                Ok(c)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.add(&other.scaled(-1.0))
            }

            pub fn max_abs(&self) -> f64 {
                self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
            }

            pub fn norm(&self) -> f64 {
                self.terms.values().map(|v| v * v).sum::<f64>().sqrt()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.terms.is_empty() {
                    return f.write_str("0");
                }
                for (i, (id, a)) in self.terms.iter().enumerate() {
                    let sign = if *a < 0.0 {
                        "-"
                    } else if i > 0 {
                        "+"
                    } else {
                        ""
                    };
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    if a.abs() == 1.0 {
                        write!(f, "{sign}{id}")?;
                    } else {
                        write!(f, "{sign}{}*{id}", a.abs())?;
                    }
                }
                Ok(())
            }
        }
    };
}

sparse_sum!(Chain);
sparse_sum!(Cochain);

/// Per-degree bases and signed face lists.
#[derive(Clone, Debug)]
pub struct CubicalComplex {
    name: String,
    basis: Vec<Vec<BasisCube>>,
    /// `faces[k][i]`: signed faces of the `i`-th `k`-cube (empty for `k = 0`).
    faces: Vec<Vec<Vec<(CubeId, f64)>>>,
    lookup: HashMap<CubeId, (usize, usize)>,
}

/// Incremental constructor for [`CubicalComplex`].
#[derive(Clone, Debug, Default)]
pub struct ComplexBuilder {
    name: String,
    cubes: Vec<(BasisCube, Vec<(CubeId, f64)>)>,
}

impl ComplexBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ComplexBuilder {
            name: name.into(),
            cubes: Vec::new(),
        }
    }

    pub fn cube(mut self, id: &str, degree: usize, faces: &[(&str, f64)]) -> Self {
        self.add_cube(
            CubeId::new(id),
            degree,
            faces.iter().map(|(f, s)| (CubeId::new(*f), *s)).collect(),
            None,
        );
        self
    }

    pub fn add_cube(
        &mut self,
        id: CubeId,
        degree: usize,
        faces: Vec<(CubeId, f64)>,
        geometry: Option<Arc<SingularCube>>,
    ) {
        self.cubes.push((
            BasisCube {
                id,
                degree,
                geometry,
            },
            faces,
        ));
    }

    pub fn build(self) -> Result<CubicalComplex> {
        let top = self.cubes.iter().map(|(c, _)| c.degree).max().unwrap_or(0);
        let mut basis = vec![Vec::new(); top + 1];
        let mut faces = vec![Vec::new(); top + 1];
        let mut lookup = HashMap::new();
        for (cube, f) in self.cubes {
            let k = cube.degree;
            if lookup
                .insert(cube.id.clone(), (k, basis[k].len()))
                .is_some()
            {
                return Err(Error::Structural(format!(
                    "duplicate cube id `{}`",
                    cube.id
                )));
            }
            if k == 0 && !f.is_empty() {
                return Err(Error::Structural(format!(
                    "0-cube `{}` cannot have faces",
                    cube.id
                )));
            }
            basis[k].push(cube);
            faces[k].push(f);
        }
        let complex = CubicalComplex {
            name: self.name,
            basis,
            faces,
            lookup,
        };
        complex.validate()?;
        Ok(complex)
    }
}

impl CubicalComplex {
    pub fn builder(name: impl Into<String>) -> ComplexBuilder {
        ComplexBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Top degree `n`.
    pub fn dim(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn basis(&self, k: usize) -> &[BasisCube] {
        self.basis.get(k).map_or(&[], |b| b.as_slice())
    }

    pub fn count(&self, k: usize) -> usize {
        self.basis(k).len()
    }

    pub fn cube(&self, id: &CubeId) -> Option<&BasisCube> {
        self.lookup.get(id).map(|&(k, i)| &self.basis[k][i])
    }

    pub fn faces_of(&self, id: &CubeId) -> Result<&[(CubeId, f64)]> {
        let &(k, i) = self
            .lookup
            .get(id)
            .ok_or_else(|| Error::UnknownCube(id.0.clone()))?;
        Ok(&self.faces[k][i])
    }

    fn validate(&self) -> Result<()> {
        for k in 1..self.basis.len() {
            for (cube, faces) in self.basis[k].iter().zip(&self.faces[k]) {
                for (f, _) in faces {
                    match self.lookup.get(f) {
                        Some(&(d, _)) if d == k - 1 => {}
                        Some(&(d, _)) => {
                            return Err(Error::Structural(format!(
                                "face `{f}` of {k}-cube `{}` has degree {d}",
                                cube.id
                            )))
                        }
                        None => {
                            return Err(Error::Structural(format!(
                                "face `{f}` of `{}` is not in the complex",
                                cube.id
                            )))
                        }
                    }
                }
            }
        }
        for k in 2..self.basis.len() {
            let prod = linalg::matmul(&self.incidence(k - 1), &self.incidence(k));
            if prod.iter().flatten().any(|v| v.abs() > 1e-12) {
                return Err(Error::Structural(format!(
                    "boundary data does not square to zero in degree {k}"
                )));
            }
        }
        Ok(())
    }

    /// Incidence matrix of `∂_k`: rows are `(k-1)`-cubes, columns `k`-cubes.
    pub fn incidence(&self, k: usize) -> Vec<Vec<f64>> {
        if k == 0 || k >= self.basis.len() {
            return Vec::new();
        }
        let rows = self.count(k - 1);
        let mut m = vec![vec![0.0; self.count(k)]; rows];
        for (j, faces) in self.faces[k].iter().enumerate() {
            for (f, s) in faces {
                let (_, i) = self.lookup[f];
                m[i][j] += s;
            }
        }
        m
    }

    fn check_chain_ids<'a>(
        &self,
        degree: usize,
        ids: impl Iterator<Item = &'a CubeId>,
    ) -> Result<()> {
        for id in ids {
            match self.lookup.get(id) {
                None => return Err(Error::UnknownCube(id.0.clone())),
                Some(&(d, _)) if d != degree => {
                    return Err(Error::DegreeMismatch {
                        expected: degree,
                        found: d,
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn to_vector(&self, degree: usize, terms: impl Iterator<Item = (CubeId, f64)>) -> Vec<f64> {
        let mut v = vec![0.0; self.count(degree)];
        for (id, a) in terms {
            v[self.lookup[&id].1] += a;
        }
        v
    }

    fn chain_from_vector(&self, degree: usize, v: &[f64]) -> Chain {
        Chain::from_terms(
            degree,
            self.basis(degree)
                .iter()
                .zip(v)
                .filter(|(_, a)| **a != 0.0)
                .map(|(c, a)| (c.id.clone(), *a)),
        )
    }

    /// Coordinates of a chain in the basis of its degree.
    pub fn chain_vector(&self, c: &Chain) -> Result<Vec<f64>> {
        self.check_chain_ids(c.degree, c.terms.keys())?;
        Ok(self.to_vector(c.degree, c.terms.iter().map(|(k, v)| (k.clone(), *v))))
    }

    /// Every basis chain of degree `k`.
    pub fn basis_chains(&self, k: usize) -> Vec<Chain> {
        self.basis(k)
            .iter()
            .map(|c| Chain::basis(k, c.id.clone()))
            .collect()
    }

    pub fn basis_cochains(&self, k: usize) -> Vec<Cochain> {
        self.basis(k)
            .iter()
            .map(|c| Cochain::basis(k, c.id.clone()))
            .collect()
    }
}

/// `∂c`, linear in `c`.
pub fn boundary(c: &Chain, complex: &CubicalComplex) -> Result<Chain> {
    if c.degree == 0 {
        return Err(Error::DegreeUnderflow { min: 1, found: 0 });
    }
    complex.check_chain_ids(c.degree, c.terms.keys())?;
    let mut out = Chain::zero(c.degree - 1);
    for (id, a) in &c.terms {
        for (f, s) in complex.faces_of(id)? {
            out.add_term(f.clone(), a * s);
        }
    }
    Ok(out)
}

/// `δc`, the transpose of the incidence data.
pub fn coboundary(c: &Cochain, complex: &CubicalComplex) -> Result<Cochain> {
    let k = c.degree;
    if k >= complex.dim() {
        return Err(Error::DegreeOverflow {
            max: complex.dim().saturating_sub(1),
            found: k,
        });
    }
    complex.check_chain_ids(k, c.terms.keys())?;
    let mut out = Cochain::zero(k + 1);
    for (cube, faces) in complex.basis[k + 1].iter().zip(&complex.faces[k + 1]) {
        let v: f64 = faces.iter().map(|(f, s)| s * c.coefficient(f)).sum();
        if v != 0.0 {
            out.add_term(cube.id.clone(), v);
        }
    }
    Ok(out)
}

/// `⟨c, z⟩ = Σ aᵢ bⁱ`.
pub fn evaluate(c: &Cochain, z: &Chain) -> Result<f64> {
    if c.degree != z.degree {
        return Err(Error::DegreeMismatch {
            expected: c.degree,
            found: z.degree,
        });
    }
    Ok(c.terms.iter().map(|(id, a)| a * z.coefficient(id)).sum())
}

pub fn is_cycle(z: &Chain, complex: &CubicalComplex) -> Result<bool> {
    if z.degree == 0 {
        complex.check_chain_ids(0, z.terms.keys())?;
        return Ok(true);
    }
    let b = boundary(z, complex)?;
    Ok(b.max_abs() <= 1e-12 * (1.0 + z.max_abs()))
}

/// Whether `∂c = z` is solvable, by least squares.
pub fn is_boundary(z: &Chain, complex: &CubicalComplex) -> Result<bool> {
    let zv = complex.chain_vector(z)?;
    let norm = zv.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(true);
    }
    let k = z.degree;
    if k + 1 > complex.dim() || complex.count(k + 1) == 0 {
        return Ok(false);
    }
    let residual = linalg::least_squares_residual(&complex.incidence(k + 1), &zv);
    Ok(residual < BOUNDARY_TOLERANCE * norm)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub degree: usize,
    pub rank_cycles: usize,
    pub rank_boundaries: usize,
    pub betti: usize,
    pub representative_cycles: Vec<Chain>,
}

/// Real homology in degree `k` by rank-nullity over the incidence matrices.
pub fn homology(complex: &CubicalComplex, k: usize) -> Result<HomologySummary> {
    if k > complex.dim() {
        return Ok(HomologySummary {
            degree: k,
            rank_cycles: 0,
            rank_boundaries: 0,
            betti: 0,
            representative_cycles: Vec::new(),
        });
    }
    let nk = complex.count(k);
    let cycles: Vec<Vec<f64>> = if k == 0 {
        (0..nk)
            .map(|i| (0..nk).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        linalg::null_space(&complex.incidence(k), nk)
    };
    let bmat = complex.incidence(k + 1);
    let boundaries: Vec<Vec<f64>> = if bmat.is_empty() {
        Vec::new()
    } else {
        linalg::column_space(&bmat)
    };
    let rank_cycles = cycles.len();
    let rank_boundaries = boundaries.len();
    // Greedy complement: keep a cycle if it is independent of what is held.
    let mut held = boundaries;
    let mut reps = Vec::new();
    for z in cycles {
        let before = held.len();
        held.push(z.clone());
        if linalg::rank_rows(&held) > before {
            reps.push(complex.chain_from_vector(k, &z).pruned(1e-12));
        } else {
            held.pop();
        }
    }
    Ok(HomologySummary {
        degree: k,
        rank_cycles,
        rank_boundaries,
        betti: rank_cycles - rank_boundaries,
        representative_cycles: reps,
    })
}

/// Betti numbers in degrees `0..=n`.
pub fn betti_numbers(complex: &CubicalComplex) -> Result<Vec<usize>> {
    (0..=complex.dim())
        .map(|k| homology(complex, k).map(|h| h.betti))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_boundary() {
        let c = CubicalComplex::builder("segment")
            .cube("p0", 0, &[])
            .cube("p1", 0, &[])
            .cube("s", 1, &[("p1", 1.0), ("p0", -1.0)])
            .build()
            .unwrap();
        let b = boundary(&Chain::basis(1, "s"), &c).unwrap();
        assert_eq!(b.coefficient(&"p1".into()), 1.0);
        assert_eq!(b.coefficient(&"p0".into()), -1.0);
        assert!(matches!(
            boundary(&Chain::basis(0, "p0"), &c),
            Err(Error::DegreeUnderflow { .. })
        ));
        assert!(matches!(
            boundary(&Chain::basis(1, "nope"), &c),
            Err(Error::UnknownCube(_))
        ));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut c = Chain::basis(1, "a");
        c.add_term("a", -1.0);
        assert!(c.is_empty());
    }

    #[test]
    fn pairing_is_dot_product() {
        let c = Cochain::from_terms(1, [("a", 2.0), ("b", 3.0)]);
        let z = Chain::from_terms(1, [("a", 5.0), ("b", 7.0)]);
        assert_eq!(evaluate(&c, &z).unwrap(), 31.0);
        assert!(evaluate(&Cochain::zero(0), &z).is_err());
    }

    #[test]
    fn rejects_bad_boundary_data() {
        let r = CubicalComplex::builder("bad")
            .cube("p", 0, &[])
            .cube("e", 1, &[("q", 1.0)])
            .build();
        assert!(matches!(r, Err(Error::Structural(_))));
    }
}
