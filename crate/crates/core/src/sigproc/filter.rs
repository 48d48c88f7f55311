use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::fft::{fft_freqs, forward_fft, inverse_fft};
use super::{cis, Signal};
use crate::error::{Error, Result};

/// Zero-padding appended before frequency-domain filtering.
pub const DEFAULT_TAIL: usize = 4096;

/// Frequency step used for finite-difference group delay (Hz).
pub const DEFAULT_GROUP_DELAY_STEP: f64 = 1e3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One rational section `B(z) / A(z)` with coefficients in powers of `z^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub b: Vec<Complex64>,
    pub a: Vec<Complex64>,
}

impl Section {
    pub fn new(b: Vec<Complex64>, a: Vec<Complex64>) -> Result<Self> {
        if b.is_empty() || a.is_empty() {
            return Err(Error::InvalidFilter("empty coefficient vector".into()));
        }
        if a[0].norm() == 0.0 {
            return Err(Error::InvalidFilter(
                "leading feedback coefficient is zero".into(),
            ));
        }
        Ok(Self { b, a })
    }

    pub fn real(b: &[f64], a: &[f64]) -> Result<Self> {
        Self::new(
            b.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    fn response(&self, z_inv: Complex64) -> Complex64 {
        poly(&self.b, z_inv) / poly(&self.a, z_inv)
    }

    /// Schur-Cohn step-down test: all roots of `A` strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        let mut a: Vec<Complex64> = self.a.clone();
        while a.len() > 1 && a.last().map_or(false, |c| c.norm() == 0.0) {
            a.pop();
        }
        while a.len() > 1 {
            let m = a.len() - 1;
            let k = a[m] / a[0];
            let kk = k.norm_sqr();
            if kk >= 1.0 {
                return false;
            }
            let next: Vec<Complex64> = (0..m)
                .map(|i| (a[i] - k * a[m - i].conj()) / (1.0 - kk))
                .collect();
            a = next;
        }
        true
    }

    fn filter_in_place(&self, x: &mut [Complex64]) {
        let a0 = self.a[0];
        let b: Vec<Complex64> = self.b.iter().map(|c| c / a0).collect();
        let a: Vec<Complex64> = self.a.iter().map(|c| c / a0).collect();
        let order = b.len().max(a.len());
        // direct form II transposed
        let mut state = vec![ZERO; order];
        for v in x.iter_mut() {
            let input = *v;
            let y = b[0] * input + state[0];
            for i in 1..order {
                let bi = b.get(i).copied().unwrap_or(ZERO);
                let ai = a.get(i).copied().unwrap_or(ZERO);
                let next = if i + 1 < order { state[i] } else { ZERO };
                state[i - 1] = bi * input - ai * y + next;
            }
            *v = y;
        }
    }
}

fn poly(c: &[Complex64], z_inv: Complex64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &ci| acc * z_inv + ci)
}

/// Cascade of rational sections at a reference sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFilter {
    pub sections: Vec<Section>,
    pub rate: f64,
    /// Set for filters only meant for response evaluation; skips the stability check.
    pub frequency_domain_only: bool,
}

impl RationalFilter {
    pub fn new(sections: Vec<Section>, rate: f64) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::InvalidFilter("no sections".into()));
        }
        if !(rate > 0.0) {
            return Err(Error::InvalidFilter("rate must be positive".into()));
        }
        let f = Self {
            sections,
            rate,
            frequency_domain_only: false,
        };
        if !f.is_stable() {
            return Err(Error::UnstableFilter(
                "feedback polynomial has roots on or outside the unit circle".into(),
            ));
        }
        Ok(f)
    }

    /// Builds a filter without the stability requirement; it can be evaluated
    /// but [`apply_filter`] refuses it.
    pub fn unchecked(sections: Vec<Section>, rate: f64) -> Self {
        Self {
            sections,
            rate,
            frequency_domain_only: true,
        }
    }

    pub fn from_coefficients(b: &[f64], a: &[f64], rate: f64) -> Result<Self> {
        Self::new(vec![Section::real(b, a)?], rate)
    }

    /// Pure delay of `k` samples.
    pub fn delay(k: usize, rate: f64) -> Result<Self> {
        let mut b = vec![0.0; k + 1];
        b[k] = 1.0;
        Self::from_coefficients(&b, &[1.0], rate)
    }

    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(Section::is_stable)
    }

    pub fn response(&self, f: f64) -> Complex64 {
        let z_inv = cis(-2.0 * PI * f / self.rate);
        self.sections.iter().map(|s| s.response(z_inv)).product()
    }
}

/// Frequency response tabulated on an ascending grid, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedResponse {
    pub freqs: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl TabulatedResponse {
    pub fn new(freqs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if freqs.len() != values.len() || freqs.is_empty() {
            return Err(Error::InvalidFilter(
                "grid and values must be non-empty and equal length".into(),
            ));
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFilter(
                "frequency grid must be strictly ascending".into(),
            ));
        }
        Ok(Self { freqs, values })
    }

    /// Tabulates `h` on an arbitrary grid (sorted internally).
    pub fn from_fn(mut freqs: Vec<f64>, h: impl Fn(f64) -> Complex64) -> Result<Self> {
        freqs.sort_by(|a, b| a.total_cmp(b));
        freqs.dedup();
        let values = freqs.iter().map(|&f| h(f)).collect();
        Self::new(freqs, values)
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.freqs[0] <= lo && *self.freqs.last().unwrap() >= hi
    }

    pub fn response(&self, f: f64) -> Option<Complex64> {
        let n = self.freqs.len();
        if f < self.freqs[0] || f > self.freqs[n - 1] {
            return None;
        }
        let i = self.freqs.partition_point(|&g| g < f);
        if i < n && self.freqs[i] == f {
            return Some(self.values[i]);
        }
        let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
        let w = (f - f0) / (f1 - f0);
        Some(self.values[i - 1] * (1.0 - w) + self.values[i] * w)
    }
}

/// Closed-form frequency response usable at any frequency.
#[derive(Clone)]
pub struct AnalyticResponse {
    pub label: String,
    func: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl AnalyticResponse {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            func: Arc::new(f),
        }
    }

    pub fn response(&self, f: f64) -> Complex64 {
        (self.func)(f)
    }
}

impl fmt::Debug for AnalyticResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticResponse")
            .field("label", &self.label)
            .finish()
    }
}

/// A linear time-invariant filter in one of its supported representations.
#[derive(Debug, Clone)]
pub enum LinearFilter {
    Rational(RationalFilter),
    Tabulated(TabulatedResponse),
    Analytic(AnalyticResponse),
    Cascade(Vec<LinearFilter>),
}

impl LinearFilter {
    /// Identity filter (single unit feed-forward tap).
    pub fn identity(rate: f64) -> Result<Self> {
        Ok(Self::Rational(RationalFilter::from_coefficients(
            &[1.0],
            &[1.0],
            rate,
        )?))
    }

    /// Chains `next` after `self`.
    pub fn then(self, next: LinearFilter) -> Self {
        match self {
            LinearFilter::Cascade(mut v) => {
                v.push(next);
                LinearFilter::Cascade(v)
            }
            first => LinearFilter::Cascade(vec![first, next]),
        }
    }

    /// Complex response at `f` Hz; `None` when a tabulated grid does not reach `f`.
    pub fn response(&self, f: f64) -> Option<Complex64> {
        match self {
            LinearFilter::Rational(r) => Some(r.response(f)),
            LinearFilter::Tabulated(t) => t.response(f),
            LinearFilter::Analytic(a) => Some(a.response(f)),
            LinearFilter::Cascade(v) => v.iter().map(|h| h.response(f)).product(),
        }
    }
}

/// Length of the zero-padded transform used for frequency-domain filtering.
pub fn transform_len(n: usize, tail: usize) -> usize {
    n + tail
}

/// Filters `s` by `h`; the output has the same length, rate and `t0`.
///
/// Rational filters run as causal recursions from a zero state. Tabulated
/// and analytic responses multiply the DFT of the signal zero-padded by
/// [`DEFAULT_TAIL`] samples, and the first `len` samples are kept.
pub fn apply_filter(s: &Signal, h: &LinearFilter) -> Result<Signal> {
    apply_filter_with_tail(s, h, DEFAULT_TAIL)
}

pub fn apply_filter_with_tail(s: &Signal, h: &LinearFilter, tail: usize) -> Result<Signal> {
    match h {
        LinearFilter::Rational(r) => {
            if r.frequency_domain_only || !r.is_stable() {
                return Err(Error::UnstableFilter(
                    "rational filter is not stable".into(),
                ));
            }
            if (r.rate - s.rate()).abs() > 1e-9 * s.rate() {
                return Err(Error::RateMismatch(r.rate, s.rate()));
            }
            let mut x = s.samples().to_vec();
            for sec in &r.sections {
                sec.filter_in_place(&mut x);
            }
            s.with_samples(x)
        }
        LinearFilter::Tabulated(t) => {
            let n = transform_len(s.len(), tail);
            let freqs = fft_freqs(n, s.rate());
            let lo = freqs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = freqs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !t.covers(lo, hi) {
                return Err(Error::InvalidFilter(format!(
                    "tabulated grid does not cover [{lo}, {hi}] Hz"
                )));
            }
            frequency_domain(s, n, |f| t.response(f).expect("grid covers transform"))
        }
        LinearFilter::Analytic(a) => {
            frequency_domain(s, transform_len(s.len(), tail), |f| a.response(f))
        }
        LinearFilter::Cascade(v) => {
            let mut out = s.clone();
            for stage in v {
                out = apply_filter_with_tail(&out, stage, tail)?;
            }
            Ok(out)
        }
    }
}

fn frequency_domain(s: &Signal, n: usize, h: impl Fn(f64) -> Complex64) -> Result<Signal> {
    let mut buf = vec![ZERO; n];
    buf[..s.len()].copy_from_slice(s.samples());
    forward_fft(&mut buf);
    for (x, f) in buf.iter_mut().zip(fft_freqs(n, s.rate())) {
        *x *= h(f);
    }
    inverse_fft(&mut buf);
    buf.truncate(s.len());
    s.with_samples(buf)
}

/// Group delay evaluated at a set of frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDelay {
    pub freqs: Vec<f64>,
    /// Seconds; positive values delay the envelope.
    pub delays: Vec<f64>,
    /// False where the response is (near) zero or the phase step is ambiguous.
    pub reliable: Vec<bool>,
}

/// `-d(arg H)/d(omega)` by central differences with a 1 kHz step.
pub fn group_delay(h: &LinearFilter, freqs: &[f64]) -> Result<GroupDelay> {
    group_delay_with_step(h, freqs, DEFAULT_GROUP_DELAY_STEP)
}

pub fn group_delay_with_step(h: &LinearFilter, freqs: &[f64], step: f64) -> Result<GroupDelay> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(
            "group delay step must be positive".into(),
        ));
    }
    let mut delays = Vec::with_capacity(freqs.len());
    let mut reliable = Vec::with_capacity(freqs.len());
    for &f in freqs {
        let hi = h.response(f + step / 2.0);
        let lo = h.response(f - step / 2.0);
        let (Some(hi), Some(lo)) = (hi, lo) else {
            return Err(Error::OutOfBand {
                freq: f,
                rate: f64::NAN,
            });
        };
        // arg of the ratio is the unwrapped phase increment for small steps
        let dphi = (hi * lo.conj()).arg();
        let mag = hi.norm().min(lo.norm());
        delays.push(-dphi / (2.0 * PI * step));
        reliable.push(mag > 1e-6 && dphi.abs() < PI / 2.0);
    }
    Ok(GroupDelay {
        freqs: freqs.to_vec(),
        delays,
        reliable,
    })
}

/// Digital Butterworth bandpass of total order `order` (even; the lowpass
/// prototype has `order / 2` poles), designed by bilinear transform with
/// pre-warped edges so the -3 dB points land on `f_lo` and `f_hi`.
pub fn butterworth_bandpass(order: usize, f_lo: f64, f_hi: f64, rate: f64) -> Result<LinearFilter> {
    if order < 2 || order % 2 != 0 {
        return Err(Error::InvalidFilter(format!(
            "order must be even and >= 2, got {order}"
        )));
    }
    if !(0.0 < f_lo && f_lo < f_hi && f_hi < rate / 2.0) {
        return Err(Error::InvalidFilter(format!(
            "band [{f_lo}, {f_hi}] Hz invalid for rate {rate} Hz"
        )));
    }
    let n = order / 2;
    let fs2 = 2.0 * rate;
    let w_lo = fs2 * (PI * f_lo / rate).tan();
    let w_hi = fs2 * (PI * f_hi / rate).tan();
    let bw = w_hi - w_lo;
    let w0sq = w_lo * w_hi;

    // analog bandpass poles from the prototype poles
    let mut poles = Vec::with_capacity(2 * n);
    for k in 0..n {
        let p = cis(PI * (2 * k + n + 1) as f64 / (2 * n) as f64);
        let half = p * bw / 2.0;
        let disc = (half * half - w0sq).sqrt();
        poles.push(half + disc);
        poles.push(half - disc);
    }
    let digital: Vec<Complex64> = poles.iter().map(|&p| (fs2 + p) / (fs2 - p)).collect();

    let mut upper: Vec<Complex64> = digital.iter().copied().filter(|z| z.im > 1e-12).collect();
    let mut real: Vec<f64> = digital
        .iter()
        .filter(|z| z.im.abs() <= 1e-12)
        .map(|z| z.re)
        .collect();
    upper.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    real.sort_by(|a, b| a.total_cmp(b));

    let numerator = [1.0, 0.0, -1.0];
    let mut sections = Vec::with_capacity(n);
    for z in upper {
        sections.push(Section::real(
            &numerator,
            &[1.0, -2.0 * z.re, z.norm_sqr()],
        )?);
    }
    for pair in real.chunks(2) {
        let (p, q) = (pair[0], *pair.get(1).unwrap_or(&0.0));
        sections.push(Section::real(&numerator, &[1.0, -(p + q), p * q])?);
    }

    // unit gain at the centre frequency of the prototype mapping
    let f_center = rate / PI * (w0sq.sqrt() / fs2).atan();
    let mut filt = RationalFilter::new(sections, rate)?;
    let g = filt.response(f_center).norm();
    for c in filt.sections[0].b.iter_mut() {
        *c /= g;
    }
    Ok(LinearFilter::Rational(filt))
}
