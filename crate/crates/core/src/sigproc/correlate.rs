use num_complex::Complex64;

use super::fft::{forward_fft, inverse_fft};
use super::Signal;
use crate::error::{Error, Result};

/// Linear cross-correlation sampled on a uniform lag axis.
///
/// `values[i]` belongs to lag `i - zero_index` samples, i.e. to
/// `origin + (i - zero_index) * dt` seconds, where `origin` absorbs any
/// difference between the two inputs' time origins.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub values: Vec<Complex64>,
    pub dt: f64,
    pub zero_index: usize,
    pub origin: f64,
}

impl Correlation {
    pub fn new(values: Vec<Complex64>, dt: f64, zero_index: usize, origin: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty correlation".into()));
        }
        if zero_index >= values.len() {
            return Err(Error::InvalidParameter(format!(
                "zero-lag index {zero_index} outside {} values",
                values.len()
            )));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(
                "lag spacing must be positive".into(),
            ));
        }
        Ok(Self {
            values,
            dt,
            zero_index,
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lag_samples(&self, index: usize) -> i64 {
        index as i64 - self.zero_index as i64
    }

    pub fn lag_seconds(&self, index: usize) -> f64 {
        self.origin + self.lag_samples(index) as f64 * self.dt
    }

    /// Index of a given lag, if it lies on the axis.
    pub fn index_of_lag(&self, lag: i64) -> Option<usize> {
        let i = self.zero_index as i64 + lag;
        (0..self.values.len() as i64)
            .contains(&i)
            .then_some(i as usize)
    }

    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Index of the largest `|value|^2`; ties go to the earliest index.
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, v) in self.values.iter().enumerate() {
            let p = v.norm_sqr();
            if p > best_val {
                best_val = p;
                best = i;
            }
        }
        best
    }
}

/// Linear cross-correlation `values[k] = sum_t a[t] * conj(b[t - k])`.
///
/// Lags run from `-(len(b) - 1)` to `len(a) - 1`. A positive lag means `a`
/// is a delayed copy of `b`.
pub fn cross_correlate(a: &Signal, b: &Signal) -> Result<Correlation> {
    if a.rate() != b.rate() {
        return Err(Error::RateMismatch(a.rate(), b.rate()));
    }
    let values = correlate_samples(a.samples(), b.samples());
    Correlation::new(values, 1.0 / a.rate(), b.len() - 1, a.t0() - b.t0())
}

/// FFT-based linear correlation of raw sample slices (same layout as
/// [`cross_correlate`]).
pub(crate) fn correlate_samples(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let na = a.len();
    let nb = b.len();
    let n = na + nb - 1;
    let mut fa = vec![Complex64::new(0.0, 0.0); n];
    let mut fb = vec![Complex64::new(0.0, 0.0); n];
    fa[..na].copy_from_slice(a);
    fb[..nb].copy_from_slice(b);
    forward_fft(&mut fa);
    forward_fft(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y.conj();
    }
    inverse_fft(&mut fa);
    // circular index of lag k is k mod n; lag -(nb-1) lands at na
    (0..n)
        .map(|i| {
            let lag = i as i64 - (nb as i64 - 1);
            fa[lag.rem_euclid(n as i64) as usize]
        })
        .collect()
}
