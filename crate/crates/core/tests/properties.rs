use maxinfer::bootstrap::{multiplier_replicates, BootstrapConfig};
use maxinfer::data::DataMatrix;
use maxinfer::diagnostics::ks_distance;
use maxinfer::maxstat::{smooth_max, MaxStatVariant};
use maxinfer::quantile::empirical_quantile;
use proptest::prelude::*;

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 1..60)
}

proptest! {
    #[test]
    fn smooth_max_sandwich(z in prop::collection::vec(-50f64..50.0, 1..40), beta in 0.01f64..100.0) {
        let f = smooth_max(&z, beta).unwrap();
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(f - m >= 0.0);
        prop_assert!(f - m <= (z.len() as f64).ln() / beta);
    }

    #[test]
    fn quantile_monotone_in_level(xs in sample(), a in 0.001f64..0.999, b in 0.001f64..0.999) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(empirical_quantile(&xs, lo).unwrap() <= empirical_quantile(&xs, hi).unwrap());
    }

    #[test]
    fn quantile_shift_equivariant(xs in sample(), level in 0.001f64..0.999, shift in -10f64..10.0) {
        let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let d = empirical_quantile(&shifted, level).unwrap() - (empirical_quantile(&xs, level).unwrap() + shift);
        prop_assert!(d.abs() <= 1e-9 * (1.0 + shift.abs() + 1e3));
    }

    #[test]
    fn quantile_is_a_sample_value(xs in sample(), level in 0.001f64..0.999) {
        let q = empirical_quantile(&xs, level).unwrap();
        prop_assert!(xs.contains(&q));
    }

    #[test]
    fn ks_symmetric_and_bounded(a in sample(), b in sample()) {
        let d = ks_distance(&a, &b).unwrap();
        prop_assert_eq!(d, ks_distance(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn multiplier_replicates_scale_equivariant(
        vals in prop::collection::vec(-5f64..5.0, 24),
        c in 0.1f64..10.0,
        seed in any::<u64>(),
    ) {
        let x = DataMatrix::from_shape_vec(8, 3, vals).unwrap();
        let cfg = BootstrapConfig::new(70, seed, MaxStatVariant::AbsoluteMax).unwrap();
        let base = multiplier_replicates(&x, &cfg).unwrap();
        let scaled = multiplier_replicates(&x.scaled(c).unwrap(), &cfg).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert!((a * c - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }
}
