use std::f64::consts::PI;

use super::fft::{fft_freqs, forward_fft, inverse_fft, spectral_resize};
use super::{cis, Signal};
use crate::error::{Error, Result};

/// Multiplies by `exp(j 2 pi f t)` using each sample's absolute time stamp.
pub fn frequency_shift(s: &Signal, f: f64) -> Result<Signal> {
    if f.abs() >= s.rate() / 2.0 {
        return Err(Error::OutOfBand {
            freq: f,
            rate: s.rate(),
        });
    }
    if f == 0.0 {
        return Ok(s.clone());
    }
    let w = 2.0 * PI * f;
    s.with_samples(
        s.samples()
            .iter()
            .enumerate()
            .map(|(k, x)| x * cis(w * s.time(k)))
            .collect(),
    )
}

/// Band-limited resampling to `new_rate`.
///
/// The whole record is transformed, its spectrum zero-padded (interpolation)
/// or truncated to the new Nyquist band (decimation, i.e. an ideal low-pass),
/// and transformed back. The record is treated as one period, so callers
/// should zero-pad signals that do not decay at their ends. `t0` is kept and
/// the output has `round(len * new_rate / rate)` samples.
pub fn resample(s: &Signal, new_rate: f64) -> Result<Signal> {
    if !(new_rate.is_finite() && new_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "resampling rate must be positive, got {new_rate}"
        )));
    }
    if new_rate == s.rate() {
        return Ok(s.clone());
    }
    let n = s.len();
    let m = ((n as f64) * new_rate / s.rate()).round().max(1.0) as usize;
    let mut spec = s.samples().to_vec();
    forward_fft(&mut spec);
    let mut out = spectral_resize(&spec, m);
    inverse_fft(&mut out);
    let scale = m as f64 / n as f64;
    out.iter_mut().for_each(|x| *x *= scale);
    Signal::with_t0(out, new_rate, s.t0())
}

/// Delays the waveform by `delay` seconds (negative advances it) with a
/// linear phase ramp across the DFT of the record.
///
/// The shift is circular over the record; pad first if content must not wrap.
pub fn fractional_delay(s: &Signal, delay: f64) -> Signal {
    if delay == 0.0 {
        return s.clone();
    }
    let n = s.len();
    let mut spec = s.samples().to_vec();
    forward_fft(&mut spec);
    let freqs = fft_freqs(n, s.rate());
    for (k, (x, f)) in spec.iter_mut().zip(&freqs).enumerate() {
        if n % 2 == 0 && k == n / 2 {
            // the Nyquist bin has no sign; its real projection keeps real inputs real
            *x *= (PI * s.rate() * delay).cos();
        } else {
            *x *= cis(-2.0 * PI * f * delay);
        }
    }
    inverse_fft(&mut spec);
    s.with_samples(spec).expect("length and rate unchanged")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn tone(f: f64, rate: f64, n: usize) -> Signal {
        Signal::new(
            (0..n)
                .map(|k| cis(2.0 * PI * f * k as f64 / rate))
                .collect(),
            rate,
        )
        .unwrap()
    }

    #[test]
    fn zero_shift_is_identity() {
        let s = tone(1e5, 1e6, 64);
        assert_eq!(frequency_shift(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn shift_of_constant_traces_a_phasor() {
        let s = Signal::new(vec![Complex64::new(1.0, 0.0); 16], 8e6).unwrap();
        let y = frequency_shift(&s, 1e6).unwrap();
        for (k, v) in y.samples().iter().enumerate() {
            let expect = cis(2.0 * PI * k as f64 / 8.0);
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_up_then_down_recovers_input() {
        let s = tone(2e5, 8e6, 100).with_time_origin(-3e-6);
        let back = frequency_shift(&frequency_shift(&s, 1.3e6).unwrap(), -1.3e6).unwrap();
        for (a, b) in s.samples().iter().zip(back.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn nyquist_shift_is_rejected() {
        let s = tone(0.0, 8e6, 4);
        assert!(frequency_shift(&s, 4e6).is_err());
    }

    #[test]
    fn same_rate_is_identity() {
        let s = tone(1e5, 1e6, 32);
        assert_eq!(resample(&s, 1e6).unwrap(), s);
    }

    #[test]
    fn decimated_tone_keeps_frequency_and_amplitude() {
        let fs = 80e6;
        let f0 = 0.5e6;
        let s = tone(f0, fs, 8000);
        let y = resample(&s, 8e6).unwrap();
        assert_eq!(y.len(), 800);
        // least-squares fit of a complex phasor at f0 over the interior
        let mid = &y.samples()[100..700];
        let fit: Complex64 = mid
            .iter()
            .enumerate()
            .map(|(k, v)| v * cis(-2.0 * PI * f0 * (k + 100) as f64 / 8e6))
            .sum::<Complex64>()
            / mid.len() as f64;
        assert!((fit.norm() - 1.0).abs() < 0.01, "amplitude {}", fit.norm());
        // residual after removing the fitted tone is small, so the frequency held
        let resid: f64 = mid
            .iter()
            .enumerate()
            .map(|(k, v)| (v - fit * cis(2.0 * PI * f0 * (k + 100) as f64 / 8e6)).norm())
            .fold(0.0, f64::max);
        assert!(resid < 0.01);
    }

    #[test]
    fn up_down_round_trip() {
        let n = 256;
        let s = Signal::new(
            (0..n)
                .map(|k| {
                    let t = k as f64 / n as f64;
                    cis(2.0 * PI * 5.0 * t) * 0.7 + cis(-2.0 * PI * 11.0 * t) * 0.2
                })
                .collect(),
            8e6,
        )
        .unwrap();
        let back = resample(&resample(&s, 80e6).unwrap(), 8e6).unwrap();
        let peak = s.peak_magnitude();
        for (a, b) in s.samples().iter().zip(back.samples()) {
            assert!((a - b).norm() < 1e-6 * peak);
        }
    }

    #[test]
    fn integer_fractional_delay_is_a_shift() {
        let g: Vec<f64> = (0..64)
            .map(|k| (-((k as f64 - 20.0) / 4.0).powi(2)).exp())
            .collect();
        let s = Signal::from_real(&g, 1.0).unwrap();
        let d = fractional_delay(&s, 3.0);
        for k in 3..64 {
            assert!((d.samples()[k].re - g[k - 3]).abs() < 1e-9);
            assert!(d.samples()[k].im.abs() < 1e-9);
        }
    }
}
