use std::f64::consts::PI;

use super::fft::{fft_freqs, forward_fft};
use super::Signal;
use crate::error::{Error, Result};

fn power_spectrum(s: &Signal) -> Result<(Vec<f64>, Vec<f64>)> {
    if s.energy() == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let mut buf = s.samples().to_vec();
    forward_fft(&mut buf);
    let power = buf.iter().map(|x| x.norm_sqr()).collect();
    Ok((fft_freqs(s.len(), s.rate()), power))
}

/// RMS bandwidth `sqrt(sum f^2 |S(f)|^2 / sum |S(f)|^2)` in Hz, with `f`
/// measured from DC of the complex baseband.
pub fn rms_bandwidth(s: &Signal) -> Result<f64> {
    let (freqs, power) = power_spectrum(s)?;
    let total: f64 = power.iter().sum();
    let second: f64 = freqs.iter().zip(&power).map(|(f, p)| f * f * p).sum();
    Ok((second / total).sqrt())
}

/// Power-weighted mean frequency of the spectrum, Hz.
pub fn spectral_centroid(s: &Signal) -> Result<f64> {
    let (freqs, power) = power_spectrum(s)?;
    let total: f64 = power.iter().sum();
    Ok(freqs.iter().zip(&power).map(|(f, p)| f * p).sum::<f64>() / total)
}

/// Cramer-Rao bound on ToA standard deviation: `sqrt(1 / (8 pi^2 SNR beta^2))`.
pub fn crlb_toa_std(snr_linear: f64, beta_rms: f64) -> Result<f64> {
    if !(snr_linear > 0.0) || !(beta_rms > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "snr ({snr_linear}) and beta ({beta_rms}) must be positive"
        )));
    }
    Ok((1.0 / (8.0 * PI * PI * snr_linear * beta_rms * beta_rms)).sqrt())
}

/// Frequency interval `(lo, hi)` holding `fraction` of the energy, trimming
/// equal tails from either side of the spectrum.
pub fn occupied_band(s: &Signal, fraction: f64) -> Result<(f64, f64)> {
    if !(0.0 < fraction && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction {fraction} not in (0, 1]"
        )));
    }
    let (freqs, power) = power_spectrum(s)?;
    let mut bins: Vec<(f64, f64)> = freqs.into_iter().zip(power).collect();
    bins.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = bins.iter().map(|b| b.1).sum();
    let tail = 0.5 * (1.0 - fraction) * total;
    let edge = |it: &mut dyn Iterator<Item = &(f64, f64)>| {
        let mut acc = 0.0;
        for &(f, p) in it {
            acc += p;
            if acc > tail {
                return f;
            }
        }
        0.0
    };
    let lo = edge(&mut bins.iter());
    let hi = edge(&mut bins.iter().rev());
    Ok((lo, hi))
}
