use std::fmt;
use std::sync::Arc;

use super::quadrature::{gauss_legendre, tensor_nodes};
use crate::error::{Error, Result};
use crate::forms::{algebra, FormField};

pub type MapFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
/// Returns the `k` tangent vectors `∂σ/∂s_j`.
pub type TangentFn = Arc<dyn Fn(&[f64]) -> Result<Vec<Vec<f64>>> + Send + Sync>;

/// Parameter-space step for finite-difference tangents.
pub const TANGENT_STEP: f64 = 1e-4;

#[derive(Clone)]
pub enum CubeGeometry {
    /// A map on the reference cube, with optional analytic tangents.
    Map {
        map: MapFn,
        tangents: Option<TangentFn>,
    },
    /// Positions and tangents known only at the tensor Gauss–Legendre nodes of `order`.
    Sampled {
        order: usize,
        positions: Vec<Vec<f64>>,
        tangents: Vec<Vec<Vec<f64>>>,
    },
}

/// A smooth map from `[0,1]^k` into flow space.
#[derive(Clone)]
pub struct SingularCube {
    degree: usize,
    ambient: usize,
    geometry: CubeGeometry,
}

impl fmt::Debug for SingularCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.geometry {
            CubeGeometry::Map { tangents, .. } => {
                if tangents.is_some() {
                    "analytic"
                } else {
                    "finite-difference"
                }
            }
            CubeGeometry::Sampled { .. } => "sampled",
        };
        f.debug_struct("SingularCube")
            .field("degree", &self.degree)
            .field("ambient", &self.ambient)
            .field("geometry", &kind)
            .finish()
    }
}

impl SingularCube {
    pub fn new(degree: usize, ambient: usize, map: MapFn, tangents: Option<TangentFn>) -> Self {
        SingularCube {
            degree,
            ambient,
            geometry: CubeGeometry::Map { map, tangents },
        }
    }

    /// An infallible map with finite-difference tangents.
    pub fn from_fn(
        degree: usize,
        ambient: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        SingularCube::new(degree, ambient, Arc::new(move |s| Ok(f(s))), None)
    }

    /// An infallible map with analytic tangents.
    pub fn analytic(
        degree: usize,
        ambient: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        t: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        SingularCube::new(
            degree,
            ambient,
            Arc::new(move |s| Ok(f(s))),
            Some(Arc::new(move |s| Ok(t(s)))),
        )
    }

    pub fn sampled(
        degree: usize,
        ambient: usize,
        order: usize,
        positions: Vec<Vec<f64>>,
        tangents: Vec<Vec<Vec<f64>>>,
    ) -> Self {
        SingularCube {
            degree,
            ambient,
            geometry: CubeGeometry::Sampled {
                order,
                positions,
                tangents,
            },
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn geometry(&self) -> &CubeGeometry {
        &self.geometry
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.geometry, CubeGeometry::Sampled { .. })
    }

    fn node_index(&self, order: usize, s: &[f64]) -> Option<usize> {
        let rule = gauss_legendre(order);
        let mut flat = 0;
        for &si in s {
            let i = rule.0.iter().position(|x| (x - si).abs() < 1e-13)?;
            flat = flat * order + i;
        }
        Some(flat)
    }

    pub fn point(&self, s: &[f64]) -> Result<Vec<f64>> {
        match &self.geometry {
            CubeGeometry::Map { map, .. } => map(s),
            CubeGeometry::Sampled {
                order, positions, ..
            } => match self.node_index(*order, s) {
                Some(i) => Ok(positions[i].clone()),
                None => Err(Error::UndefinedNode {
                    node: s.to_vec(),
                    reason: format!("sampled cube defined only at order-{order} nodes"),
                }),
            },
        }
    }

    pub fn tangents(&self, s: &[f64]) -> Result<Vec<Vec<f64>>> {
        match &self.geometry {
            CubeGeometry::Map {
                tangents: Some(t), ..
            } => t(s),
            CubeGeometry::Map { map, .. } => (0..self.degree)
                .map(|j| {
                    let h = TANGENT_STEP;
                    let mut p = s.to_vec();
                    let mut at = |m: f64| {
                        p[j] = s[j] + m * h;
                        map(&p)
                    };
                    let (a, b, c, d) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
                    Ok((0..self.ambient)
                        .map(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h))
                        .collect())
                })
                .collect(),
            CubeGeometry::Sampled {
                order, tangents, ..
            } => match self.node_index(*order, s) {
                Some(i) => Ok(tangents[i].clone()),
                None => Err(Error::UndefinedNode {
                    node: s.to_vec(),
                    reason: format!("sampled cube defined only at order-{order} nodes"),
                }),
            },
        }
    }

    /// Positions and tangents at every tensor node of `order`.
    pub fn sample(&self, order: usize) -> Result<Vec<(Vec<f64>, f64, Vec<f64>, Vec<Vec<f64>>)>> {
        tensor_nodes(order, self.degree)
            .into_iter()
            .map(|(s, w)| {
                let x = self.point(&s)?;
                let t = self.tangents(&s)?;
                Ok((s, w, x, t))
            })
            .collect()
    }

    /// `∫_σ α` by tensor Gauss–Legendre quadrature of the pulled-back form.
    pub fn integrate(&self, alpha: &FormField, order: usize) -> Result<f64> {
        if alpha.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: alpha.degree(),
            });
        }
        if alpha.dim() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: alpha.dim(),
            });
        }
        let k = self.degree;
        let n = self.ambient;
        let mut total = 0.0;
        for (s, w) in tensor_nodes(order, k) {
            let x = self.point(&s)?;
            let a = alpha.try_value(&x).map_err(|e| match e {
                Error::Excluded { zone, .. } => Error::UndefinedNode {
                    node: s.clone(),
                    reason: format!("image {x:?} inside exclusion `{zone}`"),
                },
                other => other,
            })?;
            if k == 0 {
                total += w * a[0];
                continue;
            }
            let t = self.tangents(&s)?;
            let refs: Vec<&[f64]> = t.iter().map(|v| v.as_slice()).collect();
            total += w * algebra::evaluate(n, k, &a, &refs);
        }
        Ok(total)
    }

    /// Integrand `α(σ(s))(∂σ/∂s_1, …)` at a reference point.
    pub fn integrand(&self, alpha: &FormField, s: &[f64]) -> Result<f64> {
        let x = self.point(s)?;
        let a = alpha.try_value(&x)?;
        if self.degree == 0 {
            return Ok(a[0]);
        }
        let t = self.tangents(s)?;
        let refs: Vec<&[f64]> = t.iter().map(|v| v.as_slice()).collect();
        Ok(algebra::evaluate(self.ambient, self.degree, &a, &refs))
    }

    /// Face at slot `i` (0-based) and end `e`, with sign `(-1)^(i+1+e)`.
    pub fn face(&self, slot: usize, end: usize) -> Result<(f64, SingularCube)> {
        if self.degree == 0 {
            return Err(Error::DegreeUnderflow { min: 1, found: 0 });
        }
        let CubeGeometry::Map { map, tangents } = &self.geometry else {
            return Err(Error::Structural(
                "faces of a sampled cube are not defined".into(),
            ));
        };
        let sign = if (slot + 1 + end) % 2 == 0 { 1.0 } else { -1.0 };
        let e = end as f64;
        let lift = move |s: &[f64]| {
            let mut full = Vec::with_capacity(s.len() + 1);
            full.extend_from_slice(&s[..slot]);
            full.push(e);
            full.extend_from_slice(&s[slot..]);
            full
        };
        let m = map.clone();
        let fmap: MapFn = Arc::new(move |s| m(&lift(s)));
        let ftan = tangents.clone().map(|t| {
            let f: TangentFn = Arc::new(move |s| {
                let mut all = t(&lift(s))?;
                all.remove(slot);
                Ok(all)
            });
            f
        });
        Ok((
            sign,
            SingularCube::new(self.degree - 1, self.ambient, fmap, ftan),
        ))
    }

    /// All `2k` signed faces, slot-major with the 0-face first.
    pub fn faces(&self) -> Result<Vec<(f64, SingularCube)>> {
        let mut out = Vec::with_capacity(2 * self.degree);
        for slot in 0..self.degree {
            for end in 0..2 {
                out.push(self.face(slot, end)?);
            }
        }
        Ok(out)
    }

    /// Restriction to the sub-box `Π [lo_j, lo_j + w]`, reparametrized over `[0,1]^k`.
    pub fn restrict(&self, lo: &[f64], width: f64) -> Result<SingularCube> {
        let CubeGeometry::Map { map, tangents } = &self.geometry else {
            return Err(Error::Structural(
                "a sampled cube cannot be subdivided".into(),
            ));
        };
        let lo = lo.to_vec();
        let l2 = lo.clone();
        let m = map.clone();
        let fmap: MapFn = Arc::new(move |s| {
            let p: Vec<f64> = s.iter().zip(&l2).map(|(s, l)| l + width * s).collect();
            m(&p)
        });
        let ftan = tangents.clone().map(|t| {
            let f: TangentFn = Arc::new(move |s| {
                let p: Vec<f64> = s.iter().zip(&lo).map(|(s, l)| l + width * s).collect();
                Ok(t(&p)?
                    .into_iter()
                    .map(|v| v.into_iter().map(|c| c * width).collect())
                    .collect())
            });
            f
        });
        Ok(SingularCube::new(self.degree, self.ambient, fmap, ftan))
    }
}
