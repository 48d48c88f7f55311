use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward DFT (no scaling).
pub fn forward_fft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

/// In-place inverse DFT, scaled by `1/N` so that it inverts [`forward_fft`].
pub fn inverse_fft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|x| *x *= scale);
}

/// Signed bin frequencies of an `n`-point DFT at `rate`, in FFT order
/// (`0, df, ..., -df`).
pub fn fft_freqs(n: usize, rate: f64) -> Vec<f64> {
    let df = rate / n as f64;
    (0..n)
        .map(|k| {
            let k = if k < n.div_ceil(2) {
                k as i64
            } else {
                k as i64 - n as i64
            };
            k as f64 * df
        })
        .collect()
}

/// Zero-pads or truncates a spectrum in FFT order to `m` bins.
///
/// An even-length Nyquist bin is split in half when growing and folded back
/// when shrinking, so growing then shrinking is the identity.
pub(crate) fn spectral_resize(spec: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = spec.len();
    if n == m {
        return spec.to_vec();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let small = n.min(m);
    let half = (small - 1) / 2;
    out[..=half].copy_from_slice(&spec[..=half]);
    for k in 1..=half {
        out[m - k] = spec[n - k];
    }
    if small % 2 == 0 {
        let nyq = small / 2;
        if n < m {
            out[nyq] = spec[nyq] * 0.5;
            out[m - nyq] = spec[nyq] * 0.5;
        } else {
            out[nyq] = spec[nyq] + spec[n - nyq];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn freqs_follow_fft_order() {
        assert_eq!(fft_freqs(4, 4.0), vec![0.0, 1.0, -2.0, -1.0]);
        assert_eq!(fft_freqs(5, 5.0), vec![0.0, 1.0, 2.0, -2.0, -1.0]);
    }

    #[test]
    fn resize_grow_then_shrink_is_identity() {
        for n in [7usize, 8] {
            let spec: Vec<_> = (0..n)
                .map(|k| Complex64::new(k as f64, -(k as f64)))
                .collect();
            let back = spectral_resize(&spectral_resize(&spec, 3 * n), n);
            for (a, b) in spec.iter().zip(&back) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fft_round_trip() {
        let mut v: Vec<_> = (0..12)
            .map(|k| Complex64::new((k as f64).sin(), 0.3))
            .collect();
        let orig = v.clone();
        forward_fft(&mut v);
        inverse_fft(&mut v);
        for (a, b) in orig.iter().zip(&v) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
