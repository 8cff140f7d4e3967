//! Cubical sets on the integer lattice, with the standard face orientation.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{CubeId, CubicalComplex};
use crate::error::Result;
use crate::integrate::SingularCube;

/// A product of unit or degenerate intervals: axis `i` spans
/// `[origin[i], origin[i] + 1]` when `extent[i]`, else the point `origin[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementaryCube {
    pub origin: Vec<i64>,
    pub extent: Vec<bool>,
}

impl ElementaryCube {
    pub fn new(origin: Vec<i64>, extent: Vec<bool>) -> Self {
        assert_eq!(origin.len(), extent.len());
        ElementaryCube { origin, extent }
    }

    /// The full unit cell with lower corner `origin`.
    pub fn cell(origin: Vec<i64>) -> Self {
        let n = origin.len();
        ElementaryCube::new(origin, vec![true; n])
    }

    pub fn degree(&self) -> usize {
        self.extent.iter().filter(|e| **e).count()
    }

    pub fn id(&self) -> CubeId {
        let parts: Vec<String> = self
            .origin
            .iter()
            .zip(&self.extent)
            .map(|(o, e)| {
                if *e {
                    format!("{o}:{}", o + 1)
                } else {
                    o.to_string()
                }
            })
            .collect();
        CubeId(format!("[{}]", parts.join(",")))
    }

    /// Signed faces: the `j`-th extended axis (1-based) contributes its
    /// 0-face with sign `(-1)^j` and its 1-face with sign `(-1)^(j+1)`.
    pub fn faces(&self) -> Vec<(ElementaryCube, f64)> {
        let mut out = Vec::new();
        let mut j = 0;
        for axis in 0..self.origin.len() {
            if !self.extent[axis] {
                continue;
            }
            j += 1;
            for e in 0..2 {
                let mut f = self.clone();
                f.extent[axis] = false;
                f.origin[axis] += e;
                let sign = if (j + e as usize) % 2 == 0 { 1.0 } else { -1.0 };
                out.push((f, sign));
            }
        }
        out
    }

    /// Map from the reference cube `[0,1]^k` to lattice coordinates.
    pub fn lattice_point(&self, s: &[f64]) -> Vec<f64> {
        let mut it = s.iter();
        self.origin
            .iter()
            .zip(&self.extent)
            .map(|(o, e)| *o as f64 + if *e { *it.next().unwrap() } else { 0.0 })
            .collect()
    }
}

pub type Realization = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A finite set of elementary cubes closed under taking faces.
#[derive(Clone, Debug, Default)]
pub struct CubicalSet {
    cubes: BTreeSet<ElementaryCube>,
}

impl CubicalSet {
    /// Closure of the given cubes under faces.
    pub fn from_cells(cells: impl IntoIterator<Item = ElementaryCube>) -> Self {
        let mut set = CubicalSet::default();
        for c in cells {
            set.insert_closed(c);
        }
        set
    }

    fn insert_closed(&mut self, c: ElementaryCube) {
        if self.cubes.contains(&c) {
            return;
        }
        for (f, _) in c.faces() {
            self.insert_closed(f);
        }
        self.cubes.insert(c);
    }

    /// Unit cells of an `nx × ny` grid with some cells removed.
    pub fn grid_2d(nx: i64, ny: i64, holes: &[(i64, i64)]) -> Self {
        let cells = (0..nx)
            .flat_map(|i| (0..ny).map(move |j| (i, j)))
            .filter(|ij| !holes.contains(ij))
            .map(|(i, j)| ElementaryCube::cell(vec![i, j]));
        CubicalSet::from_cells(cells)
    }

    /// Removes one cube (the caller keeps the set closed).
    pub fn remove(&mut self, c: &ElementaryCube) -> bool {
        self.cubes.remove(c)
    }

    pub fn cubes(&self) -> impl Iterator<Item = &ElementaryCube> {
        self.cubes.iter()
    }

    pub fn to_complex(
        &self,
        name: &str,
        realization: Option<Realization>,
    ) -> Result<CubicalComplex> {
        let mut b = CubicalComplex::builder(name);
        let mut ordered: Vec<&ElementaryCube> = self.cubes.iter().collect();
        ordered.sort_by_key(|c| c.degree());
        for c in ordered {
            let faces = if c.degree() == 0 {
                Vec::new()
            } else {
                c.faces().into_iter().map(|(f, s)| (f.id(), s)).collect()
            };
            let geometry = realization.as_ref().map(|r| {
                let r = r.clone();
                let cube = c.clone();
                let ambient = r(&cube.lattice_point(&vec![0.0; cube.degree()])).len();
                Arc::new(SingularCube::from_fn(c.degree(), ambient, move |s| {
                    r(&cube.lattice_point(s))
                }))
            });
            b.add_cube(c.id(), c.degree(), faces, geometry);
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_boundary_is_counterclockwise() {
        let sq = ElementaryCube::cell(vec![0, 0]);
        let faces = sq.faces();
        // bottom edge (y = 0) runs +x, right edge (x = 1) runs +y
        let bottom = faces
            .iter()
            .find(|(f, _)| f.origin == vec![0, 0] && f.extent == vec![true, false])
            .unwrap();
        let right = faces
            .iter()
            .find(|(f, _)| f.origin == vec![1, 0] && f.extent == vec![false, true])
            .unwrap();
        assert_eq!(bottom.1, 1.0);
        assert_eq!(right.1, 1.0);
    }

    #[test]
    fn closure_counts() {
        let s = CubicalSet::from_cells([ElementaryCube::cell(vec![0, 0, 0])]);
        let counts: Vec<usize> = (0..=3)
            .map(|k| s.cubes().filter(|c| c.degree() == k).count())
            .collect();
        assert_eq!(counts, vec![8, 12, 6, 1]);
    }
}
