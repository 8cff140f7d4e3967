//! Pointwise exterior algebra on component arrays.
//!
//! A degree-`k` antisymmetric tensor on `n` slots is stored as its
//! `C(n, k)` independent components, one per strictly increasing multi-index,
//! in lexicographic order. For a form `α = Σ_{I increasing} α_I dx^I` the
//! stored number is `α_I`, which is also the fully antisymmetric tensor
//! component at `I`. The same layout is used for multivectors.

use std::sync::OnceLock;

/// Largest slot count supported by the cached basis tables.
pub const MAX_DIM: usize = 6;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn tables() -> &'static Vec<Vec<Vec<Vec<usize>>>> {
    static TABLES: OnceLock<Vec<Vec<Vec<Vec<usize>>>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|n| (0..=n).map(|k| build_indices(n, k)).collect())
            .collect()
    })
}

fn build_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Increasing multi-indices of length `k` over `n` slots, lexicographic.
pub fn multi_indices(n: usize, k: usize) -> &'static [Vec<usize>] {
    assert!(n <= MAX_DIM, "dimension {n} exceeds MAX_DIM");
    if k > n {
        return &[];
    }
    &tables()[n][k]
}

/// Position of an increasing multi-index in the lexicographic layout.
pub fn index_of(n: usize, idx: &[usize]) -> usize {
    // Combinatorial ranking: count the multi-indices that precede `idx`.
    let k = idx.len();
    let mut rank = 0;
    let mut prev = 0usize;
    for (pos, &i) in idx.iter().enumerate() {
        for j in prev..i {
            rank += binomial(n - j - 1, k - pos - 1);
        }
        prev = i + 1;
    }
    rank
}

/// Sorts `idx`, returning the permutation sign, or `None` for a repeated index.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Levi-Civita symbol for a sequence of slots covering `0..n` once each.
pub fn levi_civita(seq: &[usize]) -> f64 {
    match sort_with_sign(seq) {
        Some((sorted, s)) if sorted.iter().enumerate().all(|(i, &v)| i == v) => s,
        _ => 0.0,
    }
}

/// Increasing complement of `idx` in `0..n`.
pub fn complement(n: usize, idx: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !idx.contains(i)).collect()
}

/// Full antisymmetric component `a_{idx}` for an arbitrary (unsorted) index.
pub fn component(n: usize, a: &[f64], idx: &[usize]) -> f64 {
    match sort_with_sign(idx) {
        Some((sorted, s)) => s * a[index_of(n, &sorted)],
        None => 0.0,
    }
}

type WedgeTable = Vec<(usize, usize, usize, f64)>;

fn wedge_table(n: usize, k: usize, l: usize) -> &'static WedgeTable {
    static TABLES: OnceLock<Vec<Vec<Vec<WedgeTable>>>> = OnceLock::new();
    let t = TABLES.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        (0..=n)
                            .map(|l| {
                                let mut out = Vec::new();
                                if k + l > n {
                                    return out;
                                }
                                for (ia, ii) in build_indices(n, k).iter().enumerate() {
                                    for (ib, jj) in build_indices(n, l).iter().enumerate() {
                                        let mut joined = ii.clone();
                                        joined.extend_from_slice(jj);
                                        if let Some((sorted, s)) = sort_with_sign(&joined) {
                                            out.push((ia, ib, index_of(n, &sorted), s));
                                        }
                                    }
                                }
                                out
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    });
    &t[n][k][l]
}

/// `(a ∧ b)` for a degree-`k` array `a` and degree-`l` array `b`.
pub fn wedge(n: usize, k: usize, a: &[f64], l: usize, b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; binomial(n, k + l)];
    if k + l > n {
        return out;
    }
    for &(ia, ib, o, s) in wedge_table(n, k, l) {
        out[o] += s * a[ia] * b[ib];
    }
    out
}

type InteriorTable = Vec<Vec<(usize, usize, f64)>>;

fn interior_table(n: usize, k: usize) -> &'static InteriorTable {
    static TABLES: OnceLock<Vec<Vec<InteriorTable>>> = OnceLock::new();
    let t = TABLES.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        if k == 0 {
                            return Vec::new();
                        }
                        build_indices(n, k - 1)
                            .iter()
                            .map(|jj| {
                                (0..n)
                                    .filter(|i| !jj.contains(i))
                                    .map(|i| {
                                        let mut full = vec![i];
                                        full.extend_from_slice(jj);
                                        let (sorted, s) = sort_with_sign(&full).unwrap();
                                        (i, index_of(n, &sorted), s)
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    });
    &t[n][k]
}

/// Interior product `i_X α` of a vector `x` into a degree-`k` form array.
///
/// `(i_X α)_J = Σ_i X^i α_{iJ}`, so the vector is inserted in the first slot.
pub fn interior(n: usize, x: &[f64], k: usize, a: &[f64]) -> Vec<f64> {
    if k == 0 || k > n {
        return Vec::new();
    }
    interior_table(n, k)
        .iter()
        .map(|terms| terms.iter().map(|&(i, ia, s)| s * x[i] * a[ia]).sum())
        .collect()
}

/// `#A = i_A V` for a degree-`k` multivector array: `(#A)_I = ε_{J I} A^J`,
/// `J` the increasing complement of `I`.
pub fn sharp(n: usize, k: usize, a: &[f64]) -> Vec<f64> {
    multi_indices(n, n - k)
        .iter()
        .map(|ii| {
            let jj = complement(n, ii);
            let mut seq = jj.clone();
            seq.extend_from_slice(ii);
            levi_civita(&seq) * a[index_of(n, &jj)]
        })
        .collect()
}

/// `#⁻¹α = i_α 𝐕` for a degree-`k` form array: `(#⁻¹α)^I = ε_{I J} α_J`.
pub fn sharp_inverse(n: usize, k: usize, a: &[f64]) -> Vec<f64> {
    multi_indices(n, n - k)
        .iter()
        .map(|ii| {
            let jj = complement(n, ii);
            let mut seq = ii.clone();
            seq.extend_from_slice(&jj);
            levi_civita(&seq) * a[index_of(n, &jj)]
        })
        .collect()
}

/// Evaluates a degree-`k` form array on `k` vectors: `Σ_I α_I det(v^I)`.
pub fn evaluate(n: usize, k: usize, a: &[f64], vectors: &[&[f64]]) -> f64 {
    debug_assert_eq!(vectors.len(), k);
    if k == 0 {
        return a[0];
    }
    multi_indices(n, k)
        .iter()
        .zip(a)
        .filter(|(_, &c)| c != 0.0)
        .map(|(ii, &c)| {
            let mut m = vec![0.0; k * k];
            for (r, &i) in ii.iter().enumerate() {
                for (col, v) in vectors.iter().enumerate() {
                    m[r * k + col] = v[i];
                }
            }
            c * determinant(&mut m, k)
        })
        .sum()
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `m`).
pub fn determinant(m: &mut [f64], k: usize) -> f64 {
    match k {
        0 => return 1.0,
        1 => return m[0],
        2 => return m[0] * m[3] - m[1] * m[2],
        _ => {}
    }
    let mut det = 1.0;
    for c in 0..k {
        let p = (c..k)
            .max_by(|&a, &b| m[a * k + c].abs().total_cmp(&m[b * k + c].abs()))
            .unwrap();
        if m[p * k + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..k {
                m.swap(p * k + j, c * k + j);
            }
            det = -det;
        }
        let piv = m[c * k + c];
        det *= piv;
        for r in c + 1..k {
            let f = m[r * k + c] / piv;
            for j in c..k {
                m[r * k + j] -= f * m[c * k + j];
            }
        }
    }
    det
}

/// Max-norm of a component array.
pub fn max_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_lexicographic() {
        assert_eq!(
            multi_indices(3, 2),
            &[vec![0, 1], vec![0, 2], vec![1, 2]][..]
        );
        for n in 0..=MAX_DIM {
            for k in 0..=n {
                for (pos, idx) in multi_indices(n, k).iter().enumerate() {
                    assert_eq!(index_of(n, idx), pos);
                }
                assert_eq!(multi_indices(n, k).len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn dx_wedge_dx_vanishes() {
        let dx = [1.0, 0.0, 0.0];
        assert_eq!(wedge(3, 1, &dx, 1, &dx), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn interior_of_area_form() {
        // i_{∂x}(dx∧dy) = dy
        assert_eq!(interior(2, &[1.0, 0.0], 2, &[1.0]), vec![0.0, 1.0]);
        // i_{∂y}(dx∧dy) = -dx
        assert_eq!(interior(2, &[0.0, 1.0], 2, &[1.0]), vec![-1.0, 0.0]);
    }

    #[test]
    fn sharp_of_dz_is_dxdy() {
        assert_eq!(sharp(3, 1, &[0.0, 0.0, 1.0]), vec![1.0, 0.0, 0.0]);
        // X^i = ½ ε^{ijk} α_jk: α = 5 dx∧dy ↦ (0,0,5)
        assert_eq!(sharp_inverse(3, 2, &[5.0, 0.0, 0.0]), vec![0.0, 0.0, 5.0]);
    }

    #[test]
    fn sharp_round_trip_all_degrees() {
        for n in 1..=4 {
            for k in 0..=n {
                let len = binomial(n, k);
                let a: Vec<f64> = (0..len).map(|i| 1.0 + i as f64 * 0.37).collect();
                let back = sharp_inverse(n, n - k, &sharp(n, k, &a));
                assert_eq!(back, a, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn evaluate_volume_on_frame() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let e3 = [0.0, 0.0, 1.0];
        assert_eq!(evaluate(3, 3, &[1.0], &[&e1, &e2, &e3]), 1.0);
        assert_eq!(evaluate(3, 3, &[1.0], &[&e2, &e1, &e3]), -1.0);
    }
}
