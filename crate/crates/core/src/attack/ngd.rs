use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigproc::{
    apply_filter, cis, fft_freqs, rms_bandwidth, spectral_centroid, transform_len, LinearFilter,
    RationalFilter, Section, Signal, TabulatedResponse, DEFAULT_TAIL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NgdRealization {
    #[default]
    FrequencyDomain,
    RationalDiscrete,
}

/// Negative-group-delay filter `H(w) = 1 + j w dt / (1 + j w dt)` centred on `center_freq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgdFilterSpec {
    /// Seconds of low-frequency envelope advance.
    pub delta_t: f64,
    #[serde(default)]
    pub center_freq: f64,
    #[serde(default)]
    pub realization: NgdRealization,
}

impl NgdFilterSpec {
    pub fn new(delta_t: f64, center_freq: f64) -> Self {
        Self {
            delta_t,
            center_freq,
            realization: NgdRealization::FrequencyDomain,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_t > 0.0) || !(self.center_freq >= 0.0) || !self.delta_t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "NGD needs delta_t > 0 and center_freq >= 0, got {} / {}",
                self.delta_t, self.center_freq
            )));
        }
        Ok(())
    }

    /// Baseband prototype at angular offset `w` rad/s.
    pub fn baseband(&self, w: f64) -> Complex64 {
        let jx = Complex64::new(0.0, w * self.delta_t);
        1.0 + jx / (1.0 + jx)
    }

    /// Response at `f` Hz; the negative-frequency image mirrors the positive side.
    pub fn response(&self, f: f64) -> Complex64 {
        if f >= 0.0 {
            self.baseband(2.0 * PI * (f - self.center_freq))
        } else {
            self.baseband(2.0 * PI * (-f - self.center_freq)).conj()
        }
    }

    /// Analytic group delay `-dt (1 - 2x^2) / ((1 + x^2)(1 + 4x^2))`, `x = w dt`.
    pub fn group_delay(&self, f: f64) -> f64 {
        let x = 2.0 * PI * (f.abs() - self.center_freq) * self.delta_t;
        -self.delta_t * (1.0 - 2.0 * x * x) / ((1.0 + x * x) * (1.0 + 4.0 * x * x))
    }

    /// Bilinear-transformed prototype shifted to `center_freq` (complex taps).
    pub fn rational(&self, rate: f64) -> Result<RationalFilter> {
        self.validate()?;
        let k = 2.0 * rate;
        let dt = self.delta_t;
        let b = [1.0 + 2.0 * dt * k, 1.0 - 2.0 * dt * k];
        let a = [1.0 + dt * k, 1.0 - dt * k];
        let rot = cis(2.0 * PI * self.center_freq / rate);
        let taps = |c: [f64; 2]| vec![Complex64::new(c[0], 0.0), c[1] * rot];
        RationalFilter::new(vec![Section::new(taps(b), taps(a))?], rate)
    }
}

/// Samples the NGD response at each frequency.
pub fn ngd_response(spec: &NgdFilterSpec, freqs: &[f64]) -> Vec<Complex64> {
    freqs.iter().map(|&f| spec.response(f)).collect()
}

/// Filter object for the chosen realization; the tabulated form is sampled
/// on the padded transform grid of an `n`-sample signal.
pub fn ngd_filter(spec: &NgdFilterSpec, rate: f64, n: usize) -> Result<LinearFilter> {
    spec.validate()?;
    match spec.realization {
        NgdRealization::FrequencyDomain => {
            let grid = fft_freqs(transform_len(n, DEFAULT_TAIL), rate);
            let tab = TabulatedResponse::from_fn(grid, |f| spec.response(f))?;
            Ok(LinearFilter::Tabulated(tab))
        }
        NgdRealization::RationalDiscrete => Ok(LinearFilter::Rational(spec.rational(rate)?)),
    }
}

/// Filters `s` through the NGD response.
pub fn apply_ngd(s: &Signal, spec: &NgdFilterSpec) -> Result<Signal> {
    spec.validate()?;
    let nyquist = s.rate() / 2.0;
    if spec.center_freq >= nyquist {
        return Err(Error::OutOfBand {
            freq: spec.center_freq,
            rate: s.rate(),
        });
    }
    if s.energy() > 0.0 {
        // RMS spread of the spectrum about the centre frequency
        let beta = rms_bandwidth(s)?;
        let centroid = spectral_centroid(s)?;
        let fc = spec.center_freq;
        let half_width = (beta * beta - 2.0 * fc * centroid + fc * fc)
            .max(0.0)
            .sqrt();
        if fc + half_width >= nyquist {
            return Err(Error::OutOfBand {
                freq: spec.center_freq + half_width,
                rate: s.rate(),
            });
        }
    }
    apply_filter(s, &ngd_filter(spec, s.rate(), s.len())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigproc::{frequency_shift, group_delay};

    #[test]
    fn unity_at_center_and_bounded_gain() {
        let spec = NgdFilterSpec::new(50e-9, 4.77e6);
        assert!((spec.response(4.77e6) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let far = spec.response(4.77e6 + 100e6).norm();
        assert!((far - 2.0).abs() < 1e-3);
        for k in -200..200 {
            let g = spec.response(4.77e6 + k as f64 * 0.37e6).norm();
            assert!((1.0..=2.0 + 1e-12).contains(&g));
        }
    }

    #[test]
    fn group_delay_matches_closed_form() {
        let spec = NgdFilterSpec::new(50e-9, 0.0);
        let h = LinearFilter::Analytic(crate::sigproc::AnalyticResponse::new("ngd", move |f| {
            spec.response(f)
        }));
        let freqs = [1e3, 0.5e6, 1e6, 1.0 / (2f64.sqrt() * 2.0 * PI * 50e-9)];
        let gd = group_delay(&h, &freqs).unwrap();
        for (f, d) in freqs.iter().zip(&gd.delays) {
            assert!((d - spec.group_delay(*f)).abs() < 1e-12, "{f}: {d}");
        }
        assert!((gd.delays[0] + 50e-9).abs() < 1e-11);
        assert!(gd.delays[3].abs() < 1e-12);
        // -42.2 ns at 0.5 MHz
        let x: f64 = 2.0 * PI * 0.5e6 * 50e-9;
        let expected = -50e-9 * (1.0 - 2.0 * x * x) / ((1.0 + x * x) * (1.0 + 4.0 * x * x));
        assert!((gd.delays[1] - expected).abs() < 1e-12);
        assert!((gd.delays[1] + 42.2e-9).abs() < 0.1e-9);
    }

    fn gaussian_tone(rate: f64, n: usize, f: f64, sigma: f64) -> Signal {
        let center = n as f64 / 2.0 / rate;
        let x = (0..n)
            .map(|k| {
                let t = k as f64 / rate;
                cis(2.0 * PI * f * t) * (-0.5 * ((t - center) / sigma).powi(2)).exp()
            })
            .collect();
        Signal::new(x, rate).unwrap()
    }

    fn centroid(s: &Signal) -> f64 {
        let p: Vec<f64> = s.samples().iter().map(|v| v.norm_sqr()).collect();
        let total: f64 = p.iter().sum();
        p.iter().enumerate().map(|(k, w)| k as f64 * w).sum::<f64>() / total / s.rate()
    }

    #[test]
    fn envelope_advances_by_delta_t() {
        // 0.5 MHz-wide envelope sitting on the IF
        let rate = 80e6;
        let s = gaussian_tone(rate, 8192, 4.77e6, 1.0 / (2.0 * PI * 0.25e6));
        let y = apply_ngd(&s, &NgdFilterSpec::new(50e-9, 4.77e6)).unwrap();
        let adv = centroid(&y) - centroid(&s);
        assert!((adv + 50e-9).abs() < 5e-9, "advance {adv}");
    }

    #[test]
    fn rational_form_agrees_at_low_offsets() {
        let rate = 80e6;
        let spec = NgdFilterSpec::new(62e-9, 4.77e6);
        let r = spec.rational(rate).unwrap();
        for df in [-1e6, -0.3e6, 0.0, 0.4e6, 1e6] {
            let f = 4.77e6 + df;
            assert!((r.response(f) - spec.response(f)).norm() < 2e-3);
        }
        let s = gaussian_tone(rate, 8192, 4.77e6, 1.0 / (2.0 * PI * 0.25e6));
        let mut rs = spec;
        rs.realization = NgdRealization::RationalDiscrete;
        let y = apply_ngd(&s, &rs).unwrap();
        let adv = centroid(&y) - centroid(&s);
        assert!((adv + 62e-9).abs() < 7e-9, "advance {adv}");
    }

    #[test]
    fn tiny_delta_is_identity() {
        let s = gaussian_tone(8e6, 512, 0.0, 2e-6);
        let y = apply_ngd(&s, &NgdFilterSpec::new(1e-18, 0.0)).unwrap();
        for (a, b) in y.samples().iter().zip(s.samples()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_out_of_band_center() {
        let s = gaussian_tone(8e6, 512, 0.0, 2e-6);
        assert!(apply_ngd(&s, &NgdFilterSpec::new(50e-9, 4.77e6)).is_err());
        let shifted = frequency_shift(&s, 3.9e6).unwrap();
        assert!(apply_ngd(&shifted, &NgdFilterSpec::new(50e-9, 3.9e6)).is_err());
        assert!(apply_ngd(&s, &NgdFilterSpec::new(0.0, 0.0)).is_err());
    }
}
