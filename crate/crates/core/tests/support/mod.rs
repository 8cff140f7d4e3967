//! Test-only oracles shared by the identity and acceptance tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vortexhom::complex::{CubicalSet, ElementaryCube};
use vortexhom::forms::{algebra::multi_indices, FormField, MultiVectorField};

/// Sum of `c sin(a·x + b)` terms for each component, with exact partials.
#[derive(Clone, Debug)]
pub struct Trig {
    pub dim: usize,
    pub comps: Vec<Vec<(f64, Vec<f64>, f64)>>,
}

impl Trig {
    pub fn random(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> Self {
        let comps = (0..len)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let a = (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect();
                        (rng.random_range(-1.0..1.0), a, rng.random_range(-3.0..3.0))
                    })
                    .collect()
            })
            .collect();
        Trig { dim, comps }
    }

    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        self.comps
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(c, a, b)| c * (dot(a, x) + b).sin())
                    .sum()
            })
            .collect()
    }

    /// `out[slot][comp]`.
    pub fn partials(&self, x: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|s| {
                self.comps
                    .iter()
                    .map(|terms| {
                        terms
                            .iter()
                            .map(|(c, a, b)| c * a[s] * (dot(a, x) + b).cos())
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn form(&self, k: usize) -> FormField {
        let t = self.clone();
        FormField::new(self.dim, k, move |x| t.value(x))
    }

    pub fn multivector(&self, k: usize) -> MultiVectorField {
        let t = self.clone();
        MultiVectorField::new(self.dim, k, move |x| t.value(x))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub fn point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn parity(seq: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn position(list: &[Vec<usize>], idx: &[usize]) -> usize {
    list.iter().position(|i| i == idx).unwrap()
}

/// `(dα)_J` from exact partials of a degree-`k` form.
pub fn oracle_d(n: usize, k: usize, partials: &[Vec<f64>]) -> Vec<f64> {
    let src = multi_indices(n, k);
    multi_indices(n, k + 1)
        .iter()
        .map(|jj| {
            (0..jj.len())
                .map(|p| {
                    let mut rest = jj.clone();
                    let s = rest.remove(p);
                    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                    sign * partials[s][position(src, &rest)]
                })
                .sum()
        })
        .collect()
}

/// `(#A)_I = ε(J I) A^J` with `J` the complement of `I`.
pub fn oracle_sharp(n: usize, k: usize, a: &[f64]) -> Vec<f64> {
    let src = multi_indices(n, k);
    multi_indices(n, n - k)
        .iter()
        .map(|ii| {
            let mut seq: Vec<usize> = (0..n).filter(|i| !ii.contains(i)).collect();
            let j = position(src, &seq);
            seq.extend_from_slice(ii);
            parity(&seq) * a[j]
        })
        .collect()
}

pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let s = if c % 2 == 0 { 1.0 } else { -1.0 };
                s * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Flow map `φ_s(x)` and its jacobian `Dφ_s` by RK4 on the variational system.
pub fn flow(u: &Trig, x: &[f64], s: f64, steps: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let rhs = |y: &[f64], m: &[Vec<f64>]| {
        let v = u.value(y);
        let p = u.partials(y);
        // d/ds M = (∂u/∂y) M, with (∂u^i/∂y^s) = p[s][i].
        let dm: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|c| (0..n).map(|s| p[s][i] * m[s][c]).sum())
                    .collect()
            })
            .collect();
        (v, dm)
    };
    let mut y = x.to_vec();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let h = s / steps as f64;
    let shift = |y: &[f64], m: &[Vec<f64>], dy: &[f64], dm: &[Vec<f64>], c: f64| {
        let y2: Vec<f64> = y.iter().zip(dy).map(|(a, b)| a + c * b).collect();
        let m2: Vec<Vec<f64>> = m
            .iter()
            .zip(dm)
            .map(|(r, d)| r.iter().zip(d).map(|(a, b)| a + c * b).collect())
            .collect();
        (y2, m2)
    };
    for _ in 0..steps {
        let (k1, l1) = rhs(&y, &m);
        let (y2, m2) = shift(&y, &m, &k1, &l1, h / 2.0);
        let (k2, l2) = rhs(&y2, &m2);
        let (y3, m3) = shift(&y, &m, &k2, &l2, h / 2.0);
        let (k3, l3) = rhs(&y3, &m3);
        let (y4, m4) = shift(&y, &m, &k3, &l3, h);
        let (k4, l4) = rhs(&y4, &m4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            for j in 0..n {
                m[i][j] += h / 6.0 * (l1[i][j] + 2.0 * l2[i][j] + 2.0 * l3[i][j] + l4[i][j]);
            }
        }
    }
    (y, m)
}

/// `(φ_s^* α)_I(x) = Σ_J α_J(φ_s x) det(Dφ_s[J, I])`.
pub fn pullback(u: &Trig, alpha: &Trig, k: usize, x: &[f64], s: f64) -> Vec<f64> {
    let n = x.len();
    let (y, m) = flow(u, x, s, 4);
    let a = alpha.value(&y);
    let idx = multi_indices(n, k);
    idx.iter()
        .map(|ii| {
            idx.iter()
                .zip(&a)
                .map(|(jj, aj)| {
                    let sub: Vec<Vec<f64>> = jj
                        .iter()
                        .map(|&r| ii.iter().map(|&c| m[r][c]).collect())
                        .collect();
                    aj * det(&sub)
                })
                .sum()
        })
        .collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

pub fn random_set(rng: &mut ChaCha8Rng) -> CubicalSet {
    let dim = rng.random_range(2..=3usize);
    let side = 3;
    let mut cells = Vec::new();
    let total = (side as usize).pow(dim as u32);
    for flat in 0..total {
        let origin: Vec<i64> = (0..dim)
            .map(|d| ((flat / 3usize.pow(d as u32)) % 3) as i64)
            .collect();
        if rng.random_bool(0.6) {
            cells.push(ElementaryCube::cell(origin));
        } else if rng.random_bool(0.5) {
            let extent = (0..dim).map(|_| rng.random_bool(0.5)).collect();
            cells.push(ElementaryCube::new(origin, extent));
        }
    }
    if cells.is_empty() {
        cells.push(ElementaryCube::cell(vec![0; dim]));
    }
    CubicalSet::from_cells(cells)
}
