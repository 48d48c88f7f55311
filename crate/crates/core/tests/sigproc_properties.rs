use std::f64::consts::PI;

use narrowtoa::sigproc::{
    add_awgn, apply_filter, butterworth_bandpass, cis, cross_correlate, group_delay, rms_bandwidth,
    LinearFilter, RationalFilter, Signal,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn autocorrelation_peaks_at_zero_and_is_hermitian(x in complex_vec(2..96)) {
        prop_assume!(x.iter().any(|v| v.norm() > 1e-3));
        let s = Signal::new(x, 1e6).unwrap();
        let r = cross_correlate(&s, &s).unwrap();
        let zero = r.values[r.zero_index].norm();
        for v in &r.values {
            prop_assert!(v.norm() <= zero * (1.0 + 1e-12));
        }
        let n = r.len();
        for i in 0..n {
            let mirrored = r.values[n - 1 - i].conj();
            prop_assert!((r.values[i] - mirrored).norm() <= 1e-9 * zero);
        }
    }

    #[test]
    fn filtering_is_linear(
        a in complex_vec(64..65),
        b in complex_vec(64..65),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let rate = 80e6;
        let h = butterworth_bandpass(4, 3.27e6, 6.27e6, rate).unwrap();
        let sa = Signal::new(a.clone(), rate).unwrap();
        let sb = Signal::new(b.clone(), rate).unwrap();
        let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * alpha + y * beta).collect();
        let lhs = apply_filter(&Signal::new(mix, rate).unwrap(), &h).unwrap();
        let fa = apply_filter(&sa, &h).unwrap();
        let fb = apply_filter(&sb, &h).unwrap();
        for k in 0..64 {
            let rhs = fa.samples()[k] * alpha + fb.samples()[k] * beta;
            prop_assert!((lhs.samples()[k] - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn cascade_group_delay_adds(k in 0usize..6, lo in 1.0e6f64..3.0e6, width in 1.0e6f64..3.0e6, f in 2.0e6f64..6.0e6) {
        let rate = 40e6;
        let delay = LinearFilter::Rational(RationalFilter::delay(k, rate).unwrap());
        let bp = butterworth_bandpass(4, lo, lo + width, rate).unwrap();
        let cascade = delay.clone().then(bp.clone());
        let sum = group_delay(&delay, &[f]).unwrap().delays[0] + group_delay(&bp, &[f]).unwrap().delays[0];
        let joint = group_delay(&cascade, &[f]).unwrap().delays[0];
        prop_assert!((sum - joint).abs() < 1e-12, "{sum} vs {joint}");
    }

    #[test]
    fn rms_bandwidth_ignores_gain_and_shift(x in complex_vec(8..40), gain in 0.01f64..100.0, shift in 0usize..20) {
        prop_assume!(x.iter().any(|v| v.norm() > 1e-3));
        let s = Signal::new(x, 1e6).unwrap();
        let base = rms_bandwidth(&s.padded(0, 20)).unwrap();
        let moved = rms_bandwidth(&s.scaled(Complex64::new(gain, 0.0)).padded(shift, 20 - shift)).unwrap();
        prop_assert!((base - moved).abs() <= 1e-9 * base.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn awgn_hits_requested_snr(snr in -5.0f64..30.0, seed in any::<u64>()) {
        let n = 100_000;
        let x: Vec<Complex64> = (0..n).map(|k| cis(2.0 * PI * 0.01 * k as f64)).collect();
        let s = Signal::new(x, 1e6).unwrap();
        let y = add_awgn(&s, snr, seed).unwrap();
        let noise = y.sub(&s).unwrap().mean_power();
        let expected = 10f64.powf(-snr / 10.0);
        prop_assert!((noise / expected - 1.0).abs() < 0.05);
    }
}
