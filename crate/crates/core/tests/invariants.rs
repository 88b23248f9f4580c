use fksum::fastsum::{fk_sum, fk_sum_loo, naive_ksum, SumMode, WeightedSample};
use fksum::kernel::{smooth_kernel, PolyExpKernel};
use fksum::smoothers::{kde, loclin_regression, nw_regression};
use proptest::prelude::*;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn sample() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..300).prop_flat_map(|n| {
        (
            prop::collection::vec(-50.0f64..50.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_sum_matches_naive((x, w) in sample(), order in 0usize..5, h in 0.05f64..20.0,
                              xe in prop::collection::vec(-60.0f64..60.0, 1..100)) {
        let k = smooth_kernel(order).unwrap();
        let s = WeightedSample::new(x, w).unwrap();
        let fast = fk_sum(&s, h, &k, Some(&xe), SumMode::Both, None).unwrap();
        let slow = naive_ksum(&s, h, &k, Some(&xe), SumMode::Both).unwrap();
        prop_assert!(close(&fast.ksum, &slow.ksum, 1e-10));
        prop_assert!(close(fast.dksum.as_ref().unwrap(), slow.dksum.as_ref().unwrap(), 1e-10));
    }

    #[test]
    fn shift_and_scale((x, w) in sample(), c in -1e3f64..1e3, a in 0.01f64..100.0, h in 0.1f64..5.0) {
        let k = PolyExpKernel::default();
        let base = fk_sum(&WeightedSample::new(x.clone(), w.clone()).unwrap(), h, &k, None, SumMode::Both, None).unwrap();
        let moved: Vec<f64> = x.iter().map(|v| a * (v + c)).collect();
        let r = fk_sum(&WeightedSample::new(moved, w).unwrap(), a * h, &k, None, SumMode::Both, None).unwrap();
        prop_assert!(close(&r.ksum, &base.ksum, 1e-8));
        prop_assert!(close(r.dksum.as_ref().unwrap(), base.dksum.as_ref().unwrap(), 1e-8));
    }

    #[test]
    fn loo_equals_full_minus_self((x, w) in sample(), h in 0.05f64..5.0) {
        let k = smooth_kernel(2).unwrap();
        let s = WeightedSample::new(x, w.clone()).unwrap();
        let full = fk_sum(&s, h, &k, None, SumMode::Sum, None).unwrap();
        let loo = fk_sum_loo(&s, h, &k, SumMode::Sum).unwrap();
        let recon: Vec<f64> = full.ksum.iter().zip(&w).map(|(f, wi)| f - k.beta0() * wi).collect();
        let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs())) * s.len() as f64;
        for (a, b) in loo.ksum.iter().zip(&recon) {
            prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn density_is_non_negative(x in prop::collection::vec(-5.0f64..5.0, 1..200), h in 0.01f64..3.0) {
        let d = kde(&x, h, &PolyExpKernel::default(), None).unwrap();
        prop_assert!(d.density.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn nw_stays_in_range(x in prop::collection::vec(0.0f64..10.0, 5..200), h in 0.2f64..3.0, seed in 0u64..1000) {
        let mut rng = fksum::simulate::Rng::new(seed);
        let y: Vec<f64> = x.iter().map(|v| v.sin() + rng.normal()).collect();
        let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        let f = nw_regression(&x, &y, h, &PolyExpKernel::default(), Some(&[0.0, 2.5, 5.0, 7.5, 10.0])).unwrap();
        prop_assert!(f.fitted.iter().all(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12));
    }

    #[test]
    fn loclin_affine(x in prop::collection::vec(-3.0f64..3.0, 5..200), a in -5.0f64..5.0, b in -5.0f64..5.0, h in 0.1f64..5.0) {
        let y: Vec<f64> = x.iter().map(|v| a + b * v).collect();
        let at = [-2.0, 0.0, 1.5];
        let f = loclin_regression(&x, &y, h, &PolyExpKernel::default(), Some(&at)).unwrap();
        let spread = x.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) - x.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        prop_assume!(spread > 0.5);
        for (v, e) in f.fitted.iter().zip(at) {
            prop_assert!((v - (a + b * e)).abs() <= 1e-8);
        }
    }
}
