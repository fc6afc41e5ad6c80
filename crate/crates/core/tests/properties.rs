use gcross_core::crossing::{sign_profile, Classification, ProfileOptions, Sign};
use gcross_core::hexfloat::{from_hex, to_hex};
use gcross_core::orders::{lr_check, majorizes, slr_check, v_majorizes};
use gcross_core::sweep::{majorized_pair, trial_rng};
use gcross_core::{GammaComponent, GammaConvolution, ShapeParam, WeightVector};
use proptest::prelude::*;

fn weights(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(0.1f64..5.0, n))
}

/// η = (1 − t)θ + t·(θ reversed) is majorized by θ.
fn average_with_reverse(theta: &[f64], t: f64) -> Vec<f64> {
    let n = theta.len();
    (0..n).map(|i| (1.0 - t) * theta[i] + t * theta[n - 1 - i]).collect()
}

proptest! {
    #[test]
    fn hex_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        prop_assert_eq!(from_hex(&to_hex(v)).unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn majorization_is_reflexive(v in weights(1..=6)) {
        let w = WeightVector::new(v).unwrap();
        prop_assert!(majorizes(&w, &w).unwrap());
    }

    #[test]
    fn majorization_is_transitive(mut v in weights(2..=6), t1 in 0.0f64..0.5, t2 in 0.0f64..0.5) {
        v.sort_by(f64::total_cmp);
        let a = WeightVector::new(v.clone()).unwrap();
        let mid = average_with_reverse(&v, t1);
        let b = WeightVector::new(mid.clone()).unwrap();
        let c = WeightVector::new(average_with_reverse(&mid, t2)).unwrap();
        prop_assert!(majorizes(&a, &b).unwrap());
        prop_assert!(majorizes(&b, &c).unwrap());
        prop_assert!(majorizes(&a, &c).unwrap());
    }

    #[test]
    fn majorization_has_a_v_witness(v in weights(2..=6), t in 0.0f64..0.5) {
        let theta = WeightVector::new(v.clone()).unwrap();
        let eta = WeightVector::new(average_with_reverse(&v, t)).unwrap();
        let w = v_majorizes(&theta, &eta).unwrap();
        prop_assert!(w.is_some_and(|w| w.verify(&theta, &eta)));
    }

    #[test]
    fn cdf_and_sf_are_complementary(v in weights(1..=4), alpha in 0.3f64..3.0, p in 0.001f64..0.999) {
        let f = GammaConvolution::new(v.iter().map(|&s| GammaComponent::new(alpha, s).unwrap()).collect()).unwrap();
        let x = f.quantile(p).unwrap();
        let (c, ec) = f.cdf_with_error(x).unwrap();
        let (s, es) = f.sf_with_error(x).unwrap();
        prop_assert!((c + s - 1.0).abs() <= ec + es + 4.0 * f64::EPSILON);
        prop_assert!(f.cdf(x * 1.01).unwrap() >= c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn crossing_parity_matches_endpoint_signs(seed in 0u64..1000, n in 2usize..=4, alpha in 0.5f64..2.5) {
        let (theta, eta) = majorized_pair(&mut trial_rng(seed, 0), n).unwrap();
        let r = sign_profile(&theta, &eta, ShapeParam::new(alpha).unwrap(), &ProfileOptions::default()).unwrap();
        if let (Some(k), Some(a), Some(b)) = (r.classification.crossing_count(), r.near_zero, r.at_infinity) {
            prop_assert_eq!(k % 2 == 0, a == b);
        }
    }

    #[test]
    fn swapping_weights_flips_every_sign(seed in 0u64..1000, n in 2usize..=4, alpha in 0.5f64..2.5) {
        let (theta, eta) = majorized_pair(&mut trial_rng(seed, 1), n).unwrap();
        let a = ShapeParam::new(alpha).unwrap();
        let fwd = sign_profile(&theta, &eta, a, &ProfileOptions::default()).unwrap();
        let back = sign_profile(&eta, &theta, a, &ProfileOptions::default()).unwrap();
        let flipped: Vec<Sign> = fwd.sign_sequence.iter().map(|s| match s {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }).collect();
        prop_assert_eq!(flipped, back.sign_sequence);
    }

    #[test]
    fn wider_window_keeps_the_classification(seed in 0u64..1000, n in 3usize..=4, alpha in 1.0f64..3.0) {
        let (theta, eta) = majorized_pair(&mut trial_rng(seed, 2), n).unwrap();
        let a = ShapeParam::new(alpha).unwrap();
        let base = sign_profile(&theta, &eta, a, &ProfileOptions::default()).unwrap();
        let wide = sign_profile(&theta, &eta, a, &ProfileOptions { window_scale: 4.0, ..ProfileOptions::default() }).unwrap();
        prop_assume!(base.classification != Classification::Undecided);
        prop_assert_eq!(base.classification, wide.classification);
    }

    #[test]
    fn slr_implies_lr(s1 in 0.3f64..2.0, s2 in 0.3f64..2.0, a1 in 1.0f64..4.0, da in 0.0f64..2.0) {
        let f = GammaConvolution::single(a1, s1).unwrap();
        let g = GammaConvolution::single(a1 + da, s2).unwrap();
        let window = (1e-3, 40.0);
        let slr = slr_check(&f, &g, window, 512).unwrap();
        if slr.holds() {
            prop_assert!(lr_check(&f, &g, window, 512).unwrap());
        }
    }
}
