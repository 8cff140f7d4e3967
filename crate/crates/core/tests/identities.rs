//! Randomized operator identities checked against test-only oracles.

mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::*;
use vortexhom::complex::{boundary, coboundary, Chain, Cochain};
use vortexhom::forms::{algebra::binomial, divergence, exterior_derivative, lie_derivative, sharp};

const CASES: u32 = 200;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn boundary_squares_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_set(&mut rng).to_complex("random", None).unwrap();
        for k in 2..=c.dim() {
            let z = Chain::from_terms(
                k,
                c.basis(k).iter().map(|b| (b.id.clone(), rng.random_range(-3..=3) as f64)),
            );
            let dd = boundary(&boundary(&z, &c).unwrap(), &c).unwrap();
            prop_assert!(dd.is_empty(), "∂∂z = {dd}");
        }
    }

    #[test]
    fn coboundary_squares_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_set(&mut rng).to_complex("random", None).unwrap();
        for k in 0..c.dim().saturating_sub(1) {
            let w = Cochain::from_terms(
                k,
                c.basis(k).iter().map(|b| (b.id.clone(), rng.random_range(-3..=3) as f64)),
            );
            let dd = coboundary(&coboundary(&w, &c).unwrap(), &c).unwrap();
            prop_assert!(dd.is_empty(), "δδw = {dd}");
        }
    }

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(0..=n - 2);
        let t = Trig::random(&mut rng, n, binomial(n, k));
        let alpha = t.form(k);
        let da = exterior_derivative(&alpha);
        let dda = exterior_derivative(&da);
        for _ in 0..4 {
            let x = point(&mut rng, n);
            // first derivative against the exact oracle
            prop_assert!(max_diff(&da.value(&x), &oracle_d(n, k, &t.partials(&x))) < 1e-8);
            let r = dda.value(&x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(r < 1e-6, "|ddα| = {r}");
        }
    }

    #[test]
    fn div_squared_vanishes(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(2..=n);
        let t = Trig::random(&mut rng, n, binomial(n, k));
        let a = t.multivector(k);
        let dd = divergence(&divergence(&a).unwrap()).unwrap();
        for _ in 0..4 {
            let x = point(&mut rng, n);
            let r = dd.value(&x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(r < 1e-4, "|div div A| = {r}");
        }
    }

    #[test]
    fn sharp_intertwines_div_and_d(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=n);
        let t = Trig::random(&mut rng, n, binomial(n, k));
        let lhs = sharp(&divergence(&t.multivector(k)).unwrap());
        for _ in 0..4 {
            let x = point(&mut rng, n);
            // d# A from exact partials of the oracle dual
            let p: Vec<Vec<f64>> = t.partials(&x).iter().map(|row| oracle_sharp(n, k, row)).collect();
            let rhs = oracle_d(n, n - k, &p);
            prop_assert!(max_diff(&lhs.value(&x), &rhs) < 1e-6);
            if k == 1 {
                let div: f64 = (0..n).map(|i| t.partials(&x)[i][i]).sum();
                prop_assert!((rhs[0] - div).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cartan_matches_flow_pullback(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(0..=n);
        let u = Trig::random(&mut rng, n, n);
        let a = Trig::random(&mut rng, n, binomial(n, k));
        let lie = lie_derivative(&u.multivector(1), &a.form(k)).unwrap();
        let s = 5e-4;
        for _ in 0..3 {
            let x = point(&mut rng, n);
            let fwd = pullback(&u, &a, k, &x, s);
            let back = pullback(&u, &a, k, &x, -s);
            let quotient: Vec<f64> = fwd.iter().zip(&back).map(|(f, b)| (f - b) / (2.0 * s)).collect();
            let err = max_diff(&lie.value(&x), &quotient);
            prop_assert!(err < 1e-4, "Cartan vs pullback {err}");
        }
    }
}
