//! Gauss–Legendre rules on the unit interval and their tensor products.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const DEFAULT_ORDER: usize = 8;

/// Nodes and weights of the `order`-point rule on `[0, 1]`, ascending.
pub fn gauss_legendre(order: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&order) {
        return r.clone();
    }
    let r = Arc::new(compute(order));
    cache.lock().unwrap().insert(order, r.clone());
    r
}

fn compute(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess for the i-th root of P_n on [-1, 1].
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product nodes on `[0,1]^k`, slot 0 most significant.
pub fn tensor_nodes(order: usize, k: usize) -> Vec<(Vec<f64>, f64)> {
    let rule = gauss_legendre(order);
    let (x, w) = (&rule.0, &rule.1);
    let total = order.pow(k as u32);
    (0..total)
        .map(|mut flat| {
            let mut s = vec![0.0; k];
            let mut weight = 1.0;
            for slot in (0..k).rev() {
                let i = flat % order;
                flat /= order;
                s[slot] = x[i];
                weight *= w[i];
            }
            (s, weight)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let r = gauss_legendre(5);
        // exact up to degree 9
        let approx: f64 = r.0.iter().zip(&r.1).map(|(x, w)| w * x.powi(9)).sum();
        assert!((approx - 0.1).abs() < 1e-15);
        let total: f64 = r.1.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_order_is_lexicographic() {
        let t = tensor_nodes(2, 2);
        assert!(t[0].0[0] < 0.5 && t[0].0[1] < 0.5);
        assert!(t[1].0[0] < 0.5 && t[1].0[1] > 0.5);
        assert!(t[2].0[0] > 0.5);
    }
}
