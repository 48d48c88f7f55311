use num_complex::Complex64;

use crate::error::{Error, Result};

/// A uniformly sampled complex waveform.
///
/// Sample `k` sits at time `t0 + k / rate`. The sample vector is never empty
/// and the rate is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    rate: f64,
    t0: f64,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>, rate: f64) -> Result<Self> {
        Self::with_t0(samples, rate, 0.0)
    }

    pub fn with_t0(samples: Vec<Complex64>, rate: f64, t0: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "rate must be positive, got {rate}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidSignal("signal has no samples".into()));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidSignal("t0 must be finite".into()));
        }
        Ok(Self { samples, rate, t0 })
    }

    /// Builds a signal from real-valued samples.
    pub fn from_real(samples: &[f64], rate: f64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            rate,
        )
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    /// Time stamp of sample `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.rate
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.len() as f64
    }

    pub fn peak_magnitude(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// New signal with the same rate and time origin.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::with_t0(samples, self.rate, self.t0)
    }

    pub fn with_time_origin(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    /// Zero-pads the signal; `t0` moves back so existing samples keep their time stamps.
    pub fn padded(&self, before: usize, after: usize) -> Self {
        let mut samples = vec![Complex64::new(0.0, 0.0); before];
        samples.extend_from_slice(&self.samples);
        samples.resize(samples.len() + after, Complex64::new(0.0, 0.0));
        Self {
            samples,
            rate: self.rate,
            t0: self.t0 - before as f64 / self.rate,
        }
    }

    /// Sub-signal `[start, end)`, with `t0` adjusted.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidParameter(format!(
                "slice {start}..{end} out of range for {} samples",
                self.len()
            )));
        }
        Self::with_t0(
            self.samples[start..end].to_vec(),
            self.rate,
            self.time(start),
        )
    }

    pub fn scaled(&self, gain: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            rate: self.rate,
            t0: self.t0,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s.conj()).collect(),
            rate: self.rate,
            t0: self.t0,
        }
    }

    /// Checks that `other` shares rate, length and time origin.
    pub fn check_aligned(&self, other: &Signal) -> Result<()> {
        if self.rate != other.rate {
            return Err(Error::RateMismatch(self.rate, other.rate));
        }
        if self.len() != other.len() {
            return Err(Error::Misaligned(format!(
                "lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        if (self.t0 - other.t0).abs() > 1e-3 / self.rate {
            return Err(Error::Misaligned(format!(
                "time origins differ: {} s vs {} s",
                self.t0, other.t0
            )));
        }
        Ok(())
    }

    /// Sample-wise sum of two aligned signals.
    pub fn add(&self, other: &Signal) -> Result<Self> {
        self.check_aligned(other)?;
        self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Sample-wise difference `self - other` of two aligned signals.
    pub fn sub(&self, other: &Signal) -> Result<Self> {
        self.check_aligned(other)?;
        self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}
