//! Deterministic DSP on uniformly sampled complex signals.

mod correlate;
mod fft;
mod filter;
pub mod io;
mod noise;
mod resample;
mod signal;
mod spectral;

pub use correlate::{cross_correlate, Correlation};
pub use fft::{fft_freqs, forward_fft, inverse_fft};
pub use filter::{
    apply_filter, apply_filter_with_tail, butterworth_bandpass, group_delay, group_delay_with_step,
    transform_len, AnalyticResponse, GroupDelay, LinearFilter, RationalFilter, Section,
    TabulatedResponse, DEFAULT_GROUP_DELAY_STEP, DEFAULT_TAIL,
};
pub use noise::{add_awgn, add_awgn_with_reference};
pub use resample::{fractional_delay, frequency_shift, resample};
pub use signal::Signal;
pub use spectral::{crlb_toa_std, occupied_band, rms_bandwidth, spectral_centroid};

use num_complex::Complex64;

/// Complex exponential `exp(j * phase)`.
#[inline]
pub fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// Inner product `<a, b> = sum a[k] * conj(b[k])` over the common prefix.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}
