//! Shipped complexes with known Betti numbers.

use std::sync::Arc;

use super::cubical::{CubicalSet, ElementaryCube, Realization};
use super::CubicalComplex;
use crate::error::{Error, Result};

/// Names accepted by [`golden`], with expected Betti numbers.
pub const GOLDEN: &[(&str, &[usize])] = &[
    ("circle", &[1, 1]),
    ("cylinder", &[1, 1, 0]),
    ("figure_eight", &[1, 2]),
    ("punctured_plane", &[1, 1, 0]),
    ("doubly_punctured_plane", &[1, 2, 0]),
    ("sphere", &[1, 0, 1]),
    ("ball", &[1, 0, 0, 0]),
];

pub fn golden(name: &str) -> Result<CubicalComplex> {
    match name {
        "circle" => Ok(circle()),
        "cylinder" => Ok(cylinder()),
        "figure_eight" => Ok(figure_eight()),
        "punctured_plane" => punctured_plane(None),
        "doubly_punctured_plane" => doubly_punctured_plane(None),
        "sphere" => sphere(),
        "ball" => ball(),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

pub fn expected_betti(name: &str) -> Option<&'static [usize]> {
    GOLDEN.iter().find(|(n, _)| *n == name).map(|(_, b)| *b)
}

/// Two vertices and two edges glued head to tail.
pub fn circle() -> CubicalComplex {
    CubicalComplex::builder("circle")
        .cube("v0", 0, &[])
        .cube("v1", 0, &[])
        .cube("a", 1, &[("v1", 1.0), ("v0", -1.0)])
        .cube("b", 1, &[("v0", 1.0), ("v1", -1.0)])
        .build()
        .expect("circle complex is valid")
}

/// A cylinder from two squares whose edges are identified by the boundary data.
pub fn cylinder() -> CubicalComplex {
    CubicalComplex::builder("cylinder")
        .cube("A", 0, &[])
        .cube("B", 0, &[])
        .cube("C", 0, &[])
        .cube("D", 0, &[])
        .cube("e1", 1, &[("B", 1.0), ("A", -1.0)])
        .cube("e2", 1, &[("B", 1.0), ("A", -1.0)])
        .cube("e3", 1, &[("C", 1.0), ("D", -1.0)])
        .cube("e4", 1, &[("D", 1.0), ("C", -1.0)])
        .cube("e5", 1, &[("D", 1.0), ("B", -1.0)])
        .cube("e6", 1, &[("C", 1.0), ("A", -1.0)])
        .cube(
            "s1",
            2,
            &[("e1", 1.0), ("e5", 1.0), ("e4", -1.0), ("e6", -1.0)],
        )
        .cube(
            "s2",
            2,
            &[("e2", -1.0), ("e6", 1.0), ("e3", -1.0), ("e5", -1.0)],
        )
        .build()
        .expect("cylinder complex is valid")
}

/// Two loops sharing a base vertex: the retract of the doubly punctured plane.
pub fn figure_eight() -> CubicalComplex {
    CubicalComplex::builder("figure_eight")
        .cube("v0", 0, &[])
        .cube("a", 0, &[])
        .cube("b", 0, &[])
        .cube("a1", 1, &[("a", 1.0), ("v0", -1.0)])
        .cube("a2", 1, &[("v0", 1.0), ("a", -1.0)])
        .cube("b1", 1, &[("b", 1.0), ("v0", -1.0)])
        .cube("b2", 1, &[("v0", 1.0), ("b", -1.0)])
        .build()
        .expect("figure-eight complex is valid")
}

/// A 3×3 grid of squares with the center removed.
pub fn punctured_plane(realization: Option<Realization>) -> Result<CubicalComplex> {
    CubicalSet::grid_2d(3, 3, &[(1, 1)]).to_complex("punctured_plane", realization)
}

/// A 5×3 grid of squares with two cells removed.
pub fn doubly_punctured_plane(realization: Option<Realization>) -> Result<CubicalComplex> {
    CubicalSet::grid_2d(5, 3, &[(1, 1), (3, 1)]).to_complex("doubly_punctured_plane", realization)
}

/// The boundary of the unit 3-cube.
pub fn sphere() -> Result<CubicalComplex> {
    let mut s = CubicalSet::from_cells([ElementaryCube::cell(vec![0, 0, 0])]);
    s.remove(&ElementaryCube::cell(vec![0, 0, 0]));
    s.to_complex("sphere", None)
}

/// The unit 3-cube.
pub fn ball() -> Result<CubicalComplex> {
    CubicalSet::from_cells([ElementaryCube::cell(vec![0, 0, 0])]).to_complex("ball", None)
}

/// Realization of the punctured grid centered on the origin with cell size `h`.
pub fn centered_grid(nx: f64, ny: f64, h: f64) -> Realization {
    Arc::new(move |p: &[f64]| vec![(p[0] - nx / 2.0) * h, (p[1] - ny / 2.0) * h])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{betti_numbers, boundary, Chain};

    #[test]
    fn golden_table() {
        for (name, betti) in GOLDEN {
            let c = golden(name).unwrap();
            assert_eq!(&betti_numbers(&c).unwrap()[..], *betti, "{name}");
        }
    }

    #[test]
    fn cylinder_boundary_squares_to_zero() {
        let c = cylinder();
        let s = Chain::from_terms(2, [("s1", 1.0), ("s2", 1.0)]);
        let b = boundary(&s, &c).unwrap();
        assert!(boundary(&b, &c).unwrap().is_empty());
    }
}
