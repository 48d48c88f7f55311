use serde::{Deserialize, Serialize};

use crate::btcs::{gfsk_demodulate, PhyMode};
use crate::error::{Error, Result};
use crate::sigproc::{cross_correlate, Correlation, Signal};

/// Correlation-peak time of arrival.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToaEstimate {
    /// Index of the correlation peak.
    pub coarse_index: usize,
    /// Peak lag in samples.
    pub coarse_lag: i64,
    /// Parabolic refinement in samples, within [-0.5, 0.5].
    pub fractional: f64,
    /// Arrival of the template origin on the received time axis.
    pub toa_seconds: f64,
    pub peak_magnitude: f64,
    /// Bit check outcome; false until checked.
    pub valid: bool,
    /// The peak triple had no usable curvature; `fractional` was forced to 0.
    pub degenerate_curvature: bool,
}

/// Number of whole samples in one symbol at `rate`.
pub fn symbol_lag(t_sym: f64, rate: f64) -> Result<usize> {
    let l = t_sym * rate;
    let whole = l.round();
    if !(whole >= 1.0) || (l - whole).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "symbol period {t_sym} s is not a whole number of samples at {rate} Hz"
        )));
    }
    Ok(whole as usize)
}

/// `x[n] conj(x[n - L])` on samples `L..`, time-stamped at the later sample.
fn differential(s: &Signal, lag: usize) -> Result<Signal> {
    if s.len() <= lag {
        return Err(Error::InvalidSignal(format!(
            "{} samples too short for a {lag}-sample differential",
            s.len()
        )));
    }
    let x = s.samples();
    let d = (lag..x.len()).map(|n| x[n] * x[n - lag].conj()).collect();
    Signal::with_t0(d, s.rate(), s.t0() + lag as f64 / s.rate())
}

/// Cross-correlation of the one-symbol differential products of `received`
/// and `template`, over every lag.
pub fn differential_xcorr(received: &Signal, template: &Signal, t_sym: f64) -> Result<Correlation> {
    if (received.rate() - template.rate()).abs() > 1e-9 * received.rate() {
        return Err(Error::RateMismatch(received.rate(), template.rate()));
    }
    let lag = symbol_lag(t_sym, received.rate())?;
    cross_correlate(&differential(received, lag)?, &differential(template, lag)?)
}

/// Global peak of `|c|^2` (earliest on ties) refined by a three-point parabola.
pub fn estimate_toa(c: &Correlation) -> Result<ToaEstimate> {
    let i = c.peak_index();
    if i == 0 || i + 1 >= c.len() {
        return Err(Error::EdgePeak(i));
    }
    let (ym, y0, yp) = (
        c.values[i - 1].norm_sqr(),
        c.values[i].norm_sqr(),
        c.values[i + 1].norm_sqr(),
    );
    let (fractional, degenerate) = parabolic_offset(ym, y0, yp);
    Ok(ToaEstimate {
        coarse_index: i,
        coarse_lag: c.lag_samples(i),
        fractional,
        toa_seconds: c.lag_seconds(i) + fractional * c.dt,
        peak_magnitude: y0.sqrt(),
        valid: false,
        degenerate_curvature: degenerate,
    })
}

/// Vertex offset of the parabola through `(-1, ym), (0, y0), (1, yp)`.
pub fn parabolic_offset(ym: f64, y0: f64, yp: f64) -> (f64, bool) {
    let denom = ym - 2.0 * y0 + yp;
    if !(denom < 0.0) || !denom.is_finite() {
        return (0.0, true);
    }
    ((0.5 * (ym - yp) / denom).clamp(-0.5, 0.5), false)
}

/// Demodulates from the estimated arrival and compares against `expected`.
pub fn check_bits(received: &Signal, expected: &[u8], phy: PhyMode, toa: &ToaEstimate) -> bool {
    let centre = (toa.toa_seconds + 0.5 * phy.symbol_period() - received.t0()) * received.rate();
    if !centre.is_finite() || centre < 0.0 {
        return false;
    }
    match gfsk_demodulate(received, phy, centre.round() as usize) {
        Ok(bits) => bits.len() >= expected.len() && bits[..expected.len()] == *expected,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::btcs::{gfsk_modulate, CsSyncConfig, CsSyncPacket, Payload};
    use crate::sigproc::{cis, frequency_shift};
    use num_complex::Complex64;

    fn packet() -> CsSyncPacket {
        CsSyncPacket::generate(&CsSyncConfig::new(
            PhyMode::Le1M,
            Payload::Random { n_bits: 64 },
            11,
        ))
        .unwrap()
    }

    fn delayed(s: &Signal, k: usize) -> Signal {
        s.padded(k, 0).with_time_origin(0.0)
    }

    #[test]
    fn parabola_vertices() {
        assert_eq!(parabolic_offset(1.0, 3.0, 1.0), (0.0, false));
        let (d, _) = parabolic_offset(2.0, 3.0, 2.5);
        assert!((d - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(parabolic_offset(3.0, 3.0, 3.0), (0.0, true));
    }

    #[test]
    fn self_correlation_peaks_at_zero() {
        let p = packet();
        let c = differential_xcorr(&p.waveform, &p.waveform, 1e-6).unwrap();
        let t = estimate_toa(&c).unwrap();
        assert_eq!(t.coarse_lag, 0);
        assert!(t.toa_seconds.abs() < 1e-12);
    }

    #[test]
    fn five_sample_delay() {
        let p = packet();
        let r = delayed(&p.waveform.padded(0, 16), 5);
        let c = differential_xcorr(&r, &p.waveform, 1e-6).unwrap();
        let t = estimate_toa(&c).unwrap();
        assert_eq!(t.coarse_lag, 5);
        assert!((t.toa_seconds - 5.0 / 8e6).abs() < 1e-3 / 8e6);
    }

    #[test]
    fn carrier_offset_does_not_move_peak() {
        let p = packet();
        let r = p.waveform.padded(32, 32);
        let base = estimate_toa(&differential_xcorr(&r, &p.waveform, 1e-6).unwrap()).unwrap();
        for df in [-100e3, -50e3, 50e3, 100e3] {
            let shifted = frequency_shift(&r, df).unwrap();
            let t =
                estimate_toa(&differential_xcorr(&shifted, &p.waveform, 1e-6).unwrap()).unwrap();
            assert!(
                ((t.toa_seconds - base.toa_seconds) * 8e6).abs() <= 0.125,
                "{df}"
            );
        }
    }

    #[test]
    fn non_integer_symbol_is_rejected() {
        let p = packet();
        assert!(differential_xcorr(&p.waveform, &p.waveform, 1.01e-6).is_err());
    }

    #[test]
    fn edge_peak_is_rejected() {
        let c = Correlation::new(
            vec![
                Complex64::new(5.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
            ],
            1.0,
            1,
            0.0,
        )
        .unwrap();
        assert!(matches!(estimate_toa(&c), Err(Error::EdgePeak(0))));
    }

    #[test]
    fn bit_check_clean_and_corrupted() {
        let p = packet();
        let r = p.waveform.padded(40, 40);
        let t = estimate_toa(&differential_xcorr(&r, &p.waveform, 1e-6).unwrap()).unwrap();
        assert!(check_bits(&r, &p.bits, PhyMode::Le1M, &t));

        let mut bad = p.bits.clone();
        bad[60] ^= 1;
        let wf = gfsk_modulate(&bad, PhyMode::Le1M, 8)
            .unwrap()
            .padded(40, 40);
        let t = estimate_toa(&differential_xcorr(&wf, &p.waveform, 1e-6).unwrap()).unwrap();
        assert!(!check_bits(&wf, &p.bits, PhyMode::Le1M, &t));
    }

    #[test]
    fn common_rotation_is_harmless() {
        let p = packet();
        let r = p.waveform.scaled(cis(1.1) * 3.0).padded(8, 8);
        let t = estimate_toa(&differential_xcorr(&r, &p.waveform, 1e-6).unwrap()).unwrap();
        assert_eq!(t.coarse_lag, 8);
        assert!(t.toa_seconds.abs() < 1e-12);
        assert!(check_bits(&r, &p.bits, PhyMode::Le1M, &t));
    }
}
