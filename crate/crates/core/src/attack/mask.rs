use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigproc::Signal;

/// Shape of one mask period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum MaskKind {
    /// Keeps the leading `duty` fraction of each period. `edge` is the
    /// raised-cosine transition width in seconds (default: period / 16).
    Truncation {
        duty: f64,
        #[serde(default)]
        edge: Option<f64>,
    },
    /// `exp((alpha + j alpha_imag) g'(u))` with `g'` sampled uniformly over
    /// one period and linearly interpolated.
    DerivativeExponential {
        alpha: f64,
        #[serde(default)]
        alpha_imag: f64,
        pulse_derivative: Vec<f64>,
    },
}

/// Symbol-periodic amplitude (or complex) mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskSpec {
    #[serde(flatten)]
    pub kind: MaskKind,
    /// Seconds; normally one symbol.
    pub period: f64,
    /// Seconds from the first symbol edge to the start of a mask period.
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub complex_allowed: bool,
}

impl MaskSpec {
    pub fn truncation(duty: f64, edge: f64, period: f64) -> Self {
        Self {
            kind: MaskKind::Truncation {
                duty,
                edge: Some(edge),
            },
            period,
            offset: 0.0,
            complex_allowed: false,
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0) || !self.offset.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mask period {} / offset {} invalid",
                self.period, self.offset
            )));
        }
        match &self.kind {
            MaskKind::Truncation { duty, edge } => {
                if !(*duty > 0.0 && *duty <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "duty {duty} not in (0, 1]"
                    )));
                }
                let e = edge.unwrap_or(self.period / 16.0);
                let on = duty * self.period;
                if *duty < 1.0 && !(e >= 0.0 && e <= on.min(self.period - on)) {
                    return Err(Error::InvalidParameter(format!(
                        "edge {e} s does not fit a {on} s on-window in a {} s period",
                        self.period
                    )));
                }
            }
            MaskKind::DerivativeExponential {
                alpha,
                alpha_imag,
                pulse_derivative,
            } => {
                if pulse_derivative.len() < 2 || pulse_derivative.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "pulse derivative needs at least two finite samples".into(),
                    ));
                }
                if !alpha.is_finite() || !alpha_imag.is_finite() {
                    return Err(Error::InvalidParameter("alpha must be finite".into()));
                }
                if *alpha_imag != 0.0 && !self.complex_allowed {
                    return Err(Error::InvalidParameter(
                        "imaginary alpha requires complex_allowed".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Mask value at position `u` seconds into a period (`0 <= u < period`).
    fn value_at(&self, u: f64) -> Complex64 {
        let p = self.period;
        match &self.kind {
            MaskKind::Truncation { duty, edge } => {
                if *duty >= 1.0 {
                    return Complex64::new(1.0, 0.0);
                }
                let e = edge.unwrap_or(p / 16.0);
                let on = duty * p;
                let v = if e == 0.0 {
                    f64::from(u < on)
                } else {
                    let w = if u >= p - e / 2.0 { u - p } else { u };
                    if w < e / 2.0 {
                        0.5 * (1.0 - (PI * (w + e / 2.0) / e).cos())
                    } else if w < on - e / 2.0 {
                        1.0
                    } else if w < on + e / 2.0 {
                        0.5 * (1.0 + (PI * (w - on + e / 2.0) / e).cos())
                    } else {
                        0.0
                    }
                };
                Complex64::new(v, 0.0)
            }
            MaskKind::DerivativeExponential {
                alpha,
                alpha_imag,
                pulse_derivative,
            } => {
                let g = interpolate_periodic(pulse_derivative, u / p);
                (Complex64::new(*alpha, *alpha_imag) * g).exp()
            }
        }
    }
}

fn interpolate_periodic(table: &[f64], frac: f64) -> f64 {
    let n = table.len();
    let x = frac.rem_euclid(1.0) * n as f64;
    let i = (x.floor() as usize).min(n - 1);
    let w = x - i as f64;
    table[i] * (1.0 - w) + table[(i + 1) % n] * w
}

/// Derivative of the Gaussian-filtered rectangular frequency pulse over one
/// symbol, centred and scaled to unit peak magnitude.
pub fn gaussian_pulse_derivative(bt: f64, n_points: usize) -> Vec<f64> {
    let sigma = 2f64.ln().sqrt() / (2.0 * PI * bt);
    let pdf = |z: f64| (-0.5 * z * z).exp();
    let raw: Vec<f64> = (0..n_points)
        .map(|k| {
            let t = k as f64 / n_points as f64 - 0.5;
            pdf((t + 0.5) / sigma) - pdf((t - 0.5) / sigma)
        })
        .collect();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    raw.into_iter().map(|v| v / peak).collect()
}

/// Mask samples for times `t0 + k / rate`.
fn mask_samples(spec: &MaskSpec, rate: f64, t0: f64, n: usize) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let per_samples = spec.period * rate;
    if per_samples < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "mask period spans {per_samples} samples, need >= 2"
        )));
    }
    let shift = (t0 - spec.offset) * rate;
    let whole = per_samples.round();
    let out = if (per_samples - whole).abs() < 1e-9 {
        // integer period: index modulo K keeps the mask exactly periodic
        let k_period = whole as usize;
        let base = shift.rem_euclid(whole);
        (0..n)
            .map(|k| {
                let u = ((k % k_period) as f64 + base).rem_euclid(whole);
                spec.value_at(u / rate)
            })
            .collect()
    } else {
        (0..n)
            .map(|k| spec.value_at(((k as f64 + shift) / rate).rem_euclid(spec.period)))
            .collect()
    };
    Ok(out)
}

/// Mask waveform of `n_samples` starting at the first symbol edge.
pub fn build_mask(spec: &MaskSpec, rate: f64, n_samples: usize) -> Result<Signal> {
    Signal::new(mask_samples(spec, rate, 0.0, n_samples)?, rate)
}

/// Pointwise product with the mask aligned to the signal's own time axis.
pub fn apply_mask(s: &Signal, spec: &MaskSpec) -> Result<Signal> {
    let m = mask_samples(spec, s.rate(), s.t0(), s.len())?;
    s.with_samples(s.samples().iter().zip(&m).map(|(x, w)| x * w).collect())
}
