use hypergiant_core::forests::{decode, encode, sample_forest};
use hypergiant_core::numeric::{binomial_big, ln_big, ln_binomial};
use hypergiant_core::params::{invert_psi, psi_r, ModelParams};
use hypergiant_core::simulate::{colex_rank, colex_unrank};
use hypergiant_core::LogReal;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn psi_is_increasing(r in 2u32..=8, a in 1e-6f64..0.999, b in 1e-6f64..0.999) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(psi_r(r, lo).unwrap() < psi_r(r, hi).unwrap());
        prop_assert!(psi_r(r, lo).unwrap() > 0.0);
    }
}

proptest! {
    #[test]
    fn invert_psi_roundtrip(r in 2u32..8, rho in 1e-4f64..0.99) {
        let back = invert_psi(r, psi_r(r, rho).unwrap()).unwrap();
        prop_assert!((back - rho).abs() < 1e-10 * rho.max(1e-2), "{} vs {}", back, rho);
    }

    #[test]
    fn logreal_arithmetic(x in -1e6f64..1e6, y in -1e6f64..1e6) {
        let (a, b) = (LogReal::from_f64(x), LogReal::from_f64(y));
        let tol = |v: f64| 1e-9 * v.abs().max(1.0);
        prop_assert!(((a * b).to_f64().unwrap() - x * y).abs() < tol(x * y) * 1e3);
        let sum = a.add(&b).to_f64().unwrap();
        prop_assert!((sum - (x + y)).abs() < tol(x.abs() + y.abs()));
        let diff = a.sub(&b).to_f64().unwrap();
        prop_assert!((diff - (x - y)).abs() < tol(x.abs() + y.abs()));
        if y != 0.0 {
            prop_assert!(((a / b).to_f64().unwrap() - x / y).abs() < tol(x / y));
        }
        prop_assert_eq!(a.partial_cmp(&b), x.partial_cmp(&y));
    }

    #[test]
    fn logreal_survives_huge_magnitudes(l1 in 0f64..1e6, l2 in 0f64..1e6) {
        let (a, b) = (LogReal::from_ln(l1), LogReal::from_ln(l2));
        prop_assert!(((a * b).ln().unwrap() - (l1 + l2)).abs() < 1e-9 * (l1 + l2).max(1.0));
        let s = a.add(&b).ln().unwrap();
        prop_assert!(s >= l1.max(l2) && s <= l1.max(l2) + 2f64.ln() + 1e-12);
    }

    #[test]
    fn big_binomial_logs(n in 0u64..3000, k in 0u64..3000) {
        prop_assume!(k <= n);
        let exact = ln_big(&binomial_big(n, k));
        prop_assert!((exact - ln_binomial(n, k)).abs() < 1e-9 * exact.max(1.0));
    }

    #[test]
    fn colex_roundtrip(r in 2u32..6, rank in 0u128..1_000_000_000_000u128) {
        let mut buf = vec![0u32; r as usize];
        colex_unrank(rank, r, &mut buf);
        prop_assert!(buf.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(colex_rank(&buf), rank);
    }

    #[test]
    fn forest_codec_roundtrip(r in 2u32..6, a in 1u32..8, k in 0u32..30, seed in any::<u64>()) {
        let n = a + (r - 1) * k;
        let roots: Vec<u32> = (0..a).collect();
        let others: Vec<u32> = (a..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = sample_forest(r, &roots, &others, &mut rng).unwrap();
        let code = encode(&f).unwrap();
        let back = decode(&code, &roots, r).unwrap();
        prop_assert_eq!(encode(&back).unwrap(), code);
        let mut e1 = f.edges.clone();
        let mut e2 = back.edges.clone();
        e1.sort();
        e2.sort();
        prop_assert_eq!(e1, e2);
    }

    #[test]
    fn model_parametrizations_agree(r in 2u32..6, n in 100u64..1_000_000, eps in -0.5f64..0.5) {
        let a = ModelParams::from_eps(r, n, eps).unwrap();
        let b = ModelParams::from_p(r, n, a.p).unwrap();
        prop_assert!((a.lambda - b.lambda).abs() < 1e-12 * a.lambda);
        let c = ModelParams::from_lambda(r, n, 1.0 + eps).unwrap();
        prop_assert!((a.p - c.p).abs() <= 1e-12 * a.p);
    }
}
