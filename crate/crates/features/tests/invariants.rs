use cup_features::*;
use proptest::prelude::*;

const RATE: f64 = 1000.0 / 6.0;

fn signal() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2000.0..2000.0f64, 100..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn magnitudes_scale_with_the_signal(x in signal(), s in 0.01..100.0f64) {
        let y: Vec<f64> = x.iter().map(|v| v * s).collect();
        let a = dft_mag_at(&x, PWM_HZ, RATE).unwrap();
        let b = dft_mag_at(&y, PWM_HZ, RATE).unwrap();
        prop_assert!((b - s * a).abs() <= 1e-9 * (s * a).max(1e-9));
        let sa = stft_30(&x, RATE, 7).unwrap();
        let sb = stft_30(&y, RATE, 7).unwrap();
        for (p, q) in sa.iter().zip(&sb) {
            prop_assert!((q - s * p).abs() <= 1e-9 * (s * p).max(1e-9));
            prop_assert!(*p >= 0.0);
        }
    }

    #[test]
    fn transitions_ignore_scale(x in prop::collection::vec(0.0..10.0f64, 50..400), s in 0.1..50.0f64) {
        let t: Vec<f64> = (0..x.len()).map(|i| i as f64 * 0.006).collect();
        let y: Vec<f64> = x.iter().map(|v| v * s).collect();
        let a = detect_transition(&t, &x);
        let b = detect_transition(&t, &y);
        // Boundary windows may flip only when a change sits exactly on the threshold.
        prop_assert_eq!(a.iter().map(|e| (e.start, e.end)).collect::<Vec<_>>(), b.iter().map(|e| (e.start, e.end)).collect::<Vec<_>>());
    }

    #[test]
    fn normal_is_stable_under_scaling_and_small_offsets(
        peak in 50.0..500.0f64,
        slope in 0.05..0.9f64,
        s in 0.1..10.0f64,
        off in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let curves: Vec<(f64, [f64; 4])> = SWEEP_ANGLES
            .iter()
            .map(|&a| {
                let l = peak * (1.0 - slope * (a / 30.0).max(0.0)) + a.abs();
                let r = peak * (1.0 - slope * (-a / 30.0).max(0.0)) + a.abs();
                (a, [l, l, r, r])
            })
            .collect();
        let base = normal_seek_curves(curves.clone()).unwrap();
        let all: Vec<f64> = curves.iter().flat_map(|(_, v)| v.iter().copied()).collect();
        let range = all.iter().cloned().fold(f64::MIN, f64::max) - all.iter().cloned().fold(f64::MAX, f64::min);
        let moved: Vec<(f64, [f64; 4])> = curves
            .iter()
            .map(|(a, v)| (*a, std::array::from_fn(|k| s * v[k] + s * 0.0099 * range * off[k] * 0.5)))
            .collect();
        prop_assert_eq!(base.best_angle, 0.0);
        prop_assert_eq!(normal_seek_curves(moved).unwrap().best_angle, base.best_angle);
    }
}
