use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ToaEstimate;
use crate::error::{Error, Result};
use crate::sigproc::{forward_fft, fractional_delay, Signal};

/// Envelope fraction of the median below which phase is treated as undefined.
const PHASE_ENVELOPE_FRACTION: f64 = 0.1;
/// Largest tolerated share of phase-undefined samples.
const MAX_UNDEFINED_SHARE: f64 = 0.1;
/// Zero guard around the template before sub-sample alignment.
const ALIGN_GUARD: usize = 64;

/// The three detection metrics for one packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NadmReport {
    pub ncc: f64,
    /// `None` when the received envelope leaves phase undefined.
    pub pmse: Option<f64>,
    pub dft: f64,
}

/// The template placed on the received sample grid at the estimated arrival.
#[derive(Debug, Clone)]
pub struct AlignedTemplate {
    /// First received index covered.
    pub start: usize,
    pub samples: Vec<Complex64>,
}

impl AlignedTemplate {
    pub fn end(&self) -> usize {
        self.start + self.samples.len()
    }
}

/// Shifts `template` by the estimated arrival and returns it over the
/// received indices spanned by its original extent.
pub fn align_template(
    received: &Signal,
    template: &Signal,
    toa: &ToaEstimate,
) -> Result<AlignedTemplate> {
    if (received.rate() - template.rate()).abs() > 1e-9 * received.rate() {
        return Err(Error::RateMismatch(received.rate(), template.rate()));
    }
    let rate = received.rate();
    let d = (toa.toa_seconds + template.t0() - received.t0()) * rate;
    let whole = d.floor();
    let frac = d - whole;
    let guard = template.padded(ALIGN_GUARD, ALIGN_GUARD);
    let moved = fractional_delay(&guard, frac / rate);
    let n = template.len();
    let first = whole as i64;
    let lo = first.max(0);
    let hi = (first + n as i64 + i64::from(frac > 0.0)).min(received.len() as i64);
    if hi <= lo {
        return Err(Error::Misaligned(format!(
            "template at sample {first} does not overlap {} received samples",
            received.len()
        )));
    }
    let samples = (lo..hi)
        .map(|k| moved.samples()[(k - first) as usize + ALIGN_GUARD])
        .collect();
    Ok(AlignedTemplate {
        start: lo as usize,
        samples,
    })
}

/// `|<r, s>| / (|r| |s|)` over the aligned template extent.
pub fn nadm_ncc(received: &Signal, template: &Signal, toa: &ToaEstimate) -> Result<f64> {
    let al = align_template(received, template, toa)?;
    let r = &received.samples()[al.start..al.end()];
    let rr: f64 = r.iter().map(|v| v.norm_sqr()).sum();
    let ss: f64 = al.samples.iter().map(|v| v.norm_sqr()).sum();
    if rr == 0.0 || ss == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let dot: Complex64 = r.iter().zip(&al.samples).map(|(a, b)| a * b.conj()).sum();
    Ok(dot.norm() / (rr * ss).sqrt())
}

/// Mean squared residual of the unwrapped phase difference after removing
/// the best-fit constant and linear terms.
pub fn nadm_pmse(received: &Signal, template: &Signal, toa: &ToaEstimate) -> Result<f64> {
    let al = align_template(received, template, toa)?;
    let r = &received.samples()[al.start..al.end()];
    let mut env: Vec<f64> = r.iter().map(|v| v.norm()).collect();
    env.sort_by(|a, b| a.total_cmp(b));
    let threshold = PHASE_ENVELOPE_FRACTION * env[env.len() / 2];
    let kept: Vec<(f64, f64)> = r
        .iter()
        .zip(&al.samples)
        .enumerate()
        .filter(|(_, (a, b))| a.norm() >= threshold && b.norm() > 0.0 && threshold > 0.0)
        .map(|(k, (a, b))| (k as f64, (a * b.conj()).arg()))
        .collect();
    let dropped = r.len() - kept.len();
    if dropped as f64 > MAX_UNDEFINED_SHARE * r.len() as f64 || kept.len() < 3 {
        return Err(Error::PhaseUndefined(format!(
            "{dropped} of {} samples below the envelope threshold",
            r.len()
        )));
    }
    let mut phase = Vec::with_capacity(kept.len());
    let mut prev = kept[0].1;
    let mut offset = 0.0;
    for &(_, p) in &kept {
        let mut step = p - prev;
        while step > PI {
            step -= 2.0 * PI;
            offset -= 2.0 * PI;
        }
        while step < -PI {
            step += 2.0 * PI;
            offset += 2.0 * PI;
        }
        phase.push(p + offset);
        prev = p;
    }
    let n = kept.len() as f64;
    let mt = kept.iter().map(|k| k.0).sum::<f64>() / n;
    let mp = phase.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, p) in kept.iter().zip(&phase) {
        sxy += (k.0 - mt) * (p - mp);
        sxx += (k.0 - mt).powi(2);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(kept
        .iter()
        .zip(&phase)
        .map(|(k, p)| (p - mp - slope * (k.0 - mt)).powi(2))
        .sum::<f64>()
        / n)
}

/// Energy of `|r|^2` at the symbol-rate bin (plus neighbours) over its DC energy.
pub fn nadm_dft(received: &Signal, symbol_rate: f64) -> Result<f64> {
    let n = received.len();
    let mut p: Vec<Complex64> = received
        .samples()
        .iter()
        .map(|v| Complex64::new(v.norm_sqr(), 0.0))
        .collect();
    forward_fft(&mut p);
    let dc = p[0].norm_sqr();
    if dc == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let k = (symbol_rate * n as f64 / received.rate()).round() as usize;
    if k == 0 || k + 1 >= n / 2 {
        return Err(Error::InvalidParameter(format!(
            "symbol rate {symbol_rate} Hz not resolvable in {n} samples"
        )));
    }
    let tone: f64 = (k - 1..=k + 1).map(|i| p[i].norm_sqr()).sum();
    Ok(tone / dc)
}

/// All three metrics; PMSE is absent when phase is undefined.
pub fn nadm_report(
    received: &Signal,
    template: &Signal,
    toa: &ToaEstimate,
    symbol_rate: f64,
) -> Result<NadmReport> {
    let ncc = nadm_ncc(received, template, toa)?;
    let pmse = match nadm_pmse(received, template, toa) {
        Ok(v) => Some(v),
        Err(Error::PhaseUndefined(_)) => None,
        Err(e) => return Err(e),
    };
    let al = align_template(received, template, toa)?;
    let cropped = received.slice(al.start, al.end())?;
    let dft = nadm_dft(&cropped, symbol_rate)?;
    Ok(NadmReport { ncc, pmse, dft })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::{apply_mask, MaskSpec};
    use crate::btcs::{CsSyncConfig, CsSyncPacket, Payload, PhyMode};
    use crate::receiver::{differential_xcorr, estimate_toa};
    use crate::sigproc::{add_awgn, cis};
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn packet(seed: u64) -> CsSyncPacket {
        CsSyncPacket::generate(&CsSyncConfig::new(
            PhyMode::Le1M,
            Payload::Random { n_bits: 64 },
            seed,
        ))
        .unwrap()
    }

    fn toa_of(r: &Signal, s: &Signal) -> ToaEstimate {
        estimate_toa(&differential_xcorr(r, s, 1e-6).unwrap()).unwrap()
    }

    #[test]
    fn perfect_match() {
        let p = packet(1);
        let r = p.waveform.padded(24, 24);
        let t = toa_of(&r, &p.waveform);
        assert!((nadm_ncc(&r, &p.waveform, &t).unwrap() - 1.0).abs() < 1e-9);
        assert!(nadm_pmse(&r, &p.waveform, &t).unwrap() < 1e-12);
    }

    #[test]
    fn phase_nuisance_is_removed() {
        let p = packet(2);
        let x: Vec<Complex64> = p
            .waveform
            .samples()
            .iter()
            .enumerate()
            .map(|(k, v)| v * cis(0.3 + 2.0 * PI * 10e3 * k as f64 / 8e6))
            .collect();
        let r = p.waveform.with_samples(x).unwrap().padded(16, 16);
        let t = toa_of(&r, &p.waveform);
        assert!(nadm_pmse(&r, &p.waveform, &t).unwrap() < 1e-9);
    }

    #[test]
    fn noisy_packets_keep_high_ncc() {
        for seed in 0..100 {
            let p = packet(seed);
            let r = add_awgn(&p.waveform, 20.0, seed).unwrap().padded(16, 16);
            let t = toa_of(&r, &p.waveform);
            let ncc = nadm_ncc(&r, &p.waveform, &t).unwrap();
            assert!((0.97..=1.0 + 1e-12).contains(&ncc), "seed {seed}: {ncc}");
            assert!(nadm_pmse(&r, &p.waveform, &t).unwrap() > 0.0);
        }
    }

    #[test]
    fn unrelated_noise_has_low_ncc() {
        let p = packet(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let noise: Vec<Complex64> = (0..p.waveform.len() + 32)
            .map(|_| {
                Complex64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        let r = Signal::with_t0(noise, 8e6, -16.0 / 8e6).unwrap();
        let t = toa_of(&r, &p.waveform);
        assert!(nadm_ncc(&r, &p.waveform, &t).unwrap() < 0.2);
    }

    #[test]
    fn dft_separates_mask_from_clean() {
        let p = packet(4);
        let clean = nadm_dft(&p.waveform, 1e6).unwrap();
        assert!(clean < 1e-20);
        let masked = apply_mask(&p.waveform, &MaskSpec::truncation(0.5, 0.0, 1e-6)).unwrap();
        let m = nadm_dft(&masked, 1e6).unwrap();
        assert!(m > 10.0 * clean && m > 0.1);
    }

    #[test]
    fn amplitude_invariance() {
        let p = packet(5);
        let r = add_awgn(&p.waveform, 15.0, 9).unwrap().padded(16, 16);
        let big = r.scaled(Complex64::new(7.5, 0.0));
        let (t1, t2) = (toa_of(&r, &p.waveform), toa_of(&big, &p.waveform));
        assert!((t1.toa_seconds - t2.toa_seconds).abs() < 1e-15);
        let a = nadm_report(&r, &p.waveform, &t1, 1e6).unwrap();
        let b = nadm_report(&big, &p.waveform, &t2, 1e6).unwrap();
        assert!((a.ncc - b.ncc).abs() < 1e-12);
        assert!((a.dft - b.dft).abs() < 1e-12 * a.dft.max(1e-30));
    }

    #[test]
    fn masked_envelope_leaves_phase_undefined() {
        let p = packet(6);
        let masked = apply_mask(&p.waveform, &MaskSpec::truncation(0.5, 0.0, 1e-6)).unwrap();
        let r = masked.padded(16, 16);
        let t = toa_of(&r, &p.waveform);
        assert!(matches!(
            nadm_pmse(&r, &p.waveform, &t),
            Err(Error::PhaseUndefined(_))
        ));
        assert!(nadm_report(&r, &p.waveform, &t, 1e6)
            .unwrap()
            .pmse
            .is_none());
    }
}
