//! Uniform Cartesian sample grids with exclusion masking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{Exclusion, DEFAULT_STEP};

pub const DEFAULT_RESOLUTION: usize = 32;

/// Extra clearance kept around exclusion zones so stencils stay outside.
pub const STENCIL_MARGIN: f64 = 4.0 * DEFAULT_STEP;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub bounds: Vec<(f64, f64)>,
    pub resolution: usize,
}

impl Grid {
    pub fn new(bounds: Vec<(f64, f64)>, resolution: usize) -> Result<Self> {
        if resolution == 0 || bounds.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if bounds.iter().any(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::Precondition(format!(
                "invalid grid bounds {bounds:?}"
            )));
        }
        Ok(Grid { bounds, resolution })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    fn coordinate(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        if self.resolution == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (self.resolution - 1) as f64
        }
    }

    /// All `resolutionⁿ` points, last axis fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let m = self.resolution;
        (0..m.pow(n as u32))
            .map(|mut flat| {
                let mut idx = vec![0; n];
                for a in (0..n).rev() {
                    idx[a] = flat % m;
                    flat /= m;
                }
                (0..n).map(|a| self.coordinate(a, idx[a])).collect()
            })
            .collect()
    }

    /// Grid points at least `margin` outside every exclusion zone.
    pub fn masked(&self, exclusions: &[Exclusion], margin: f64) -> Vec<Vec<f64>> {
        self.points()
            .into_iter()
            .filter(|x| {
                exclusions
                    .iter()
                    .all(|e| e.distance(x) >= e.radius + margin)
            })
            .collect()
    }
}
