use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::{run_experiment, ExperimentConfig, ExperimentResult};
use crate::attack::{apply_mask, MaskSpec};
use crate::btcs::{CsSyncConfig, CsSyncPacket, Payload, PhyMode};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::receiver::{differential_xcorr, estimate_toa, PacketRecord};
use crate::sigproc::{add_awgn_with_reference, crlb_toa_std, rms_bandwidth, Signal};

/// Fraction of `values` inside `[lo, hi]`; missing values count as outside.
pub fn envelope_overlap(values: &[Option<f64>], lo: f64, hi: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let inside = values
        .iter()
        .filter(|v| v.is_some_and(|x| x >= lo && x <= hi))
        .count();
    inside as f64 / values.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricOverlap {
    pub metric: String,
    /// `[min, max]` over the reference (legitimate) packets.
    pub envelope: Option<[f64; 2]>,
    pub overlap: f64,
}

type MetricFn = fn(&PacketRecord) -> Option<f64>;

const METRICS: [(&str, MetricFn); 3] = [
    ("ncc", |r| Some(r.ncc)),
    ("pmse", |r| r.pmse),
    ("dft", |r| Some(r.dft)),
];

/// Envelope overlap of `candidate` against `reference`, per metric.
pub fn metric_overlap(
    reference: &[PacketRecord],
    candidate: &[PacketRecord],
) -> Vec<MetricOverlap> {
    METRICS
        .iter()
        .map(|(name, f)| {
            let refs: Vec<f64> = reference.iter().filter_map(f).collect();
            let envelope = (!refs.is_empty()).then(|| {
                [
                    refs.iter().cloned().fold(f64::INFINITY, f64::min),
                    refs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                ]
            });
            let vals: Vec<Option<f64>> = candidate.iter().map(f).collect();
            MetricOverlap {
                metric: name.to_string(),
                envelope,
                overlap: envelope.map_or(0.0, |[lo, hi]| envelope_overlap(&vals, lo, hi)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub id: String,
    pub overlaps: Vec<MetricOverlap>,
}

impl MetricComparison {
    pub fn overlap(&self, metric: &str) -> Option<f64> {
        self.overlaps
            .iter()
            .find(|o| o.metric == metric)
            .map(|o| o.overlap)
    }
}

#[derive(Debug, Clone)]
pub struct MetricStudy {
    pub reference: ExperimentResult,
    pub candidates: Vec<ExperimentResult>,
    pub comparisons: Vec<MetricComparison>,
}

/// Runs a legitimate reference experiment and any number of candidates and
/// compares their metric distributions.
pub fn run_metric_study(
    reference: &ExperimentConfig,
    candidates: &[ExperimentConfig],
) -> Result<MetricStudy> {
    let reference = run_experiment(reference)?;
    let candidates = candidates
        .iter()
        .map(run_experiment)
        .collect::<Result<Vec<_>>>()?;
    let comparisons = candidates
        .iter()
        .map(|c| MetricComparison {
            id: c.config.id.clone(),
            overlaps: metric_overlap(&reference.records, &c.records),
        })
        .collect();
    Ok(MetricStudy {
        reference,
        candidates,
        comparisons,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrlbRow {
    pub snr_db: f64,
    /// Packet energy over noise density, linear.
    pub energy_snr: f64,
    pub beta_rms: f64,
    pub toa_std: f64,
    pub crlb_std: f64,
}

impl CrlbRow {
    pub fn ratio(&self) -> f64 {
        self.toa_std / self.crlb_std
    }
}

/// Monte Carlo ToA spread of the receiver on a clean packet in AWGN at each
/// per-sample SNR, against the bound for the packet's energy SNR.
pub fn crlb_study(phy: PhyMode, snrs_db: &[f64], trials: usize, seed: u64) -> Result<Vec<CrlbRow>> {
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least two trials".into()));
    }
    let packet = CsSyncPacket::generate(&CsSyncConfig::new(
        phy,
        Payload::Random { n_bits: 128 },
        seed,
    ))?;
    let x = &packet.waveform;
    let pad = 16 * packet.oversampling;
    let padded = x.padded(pad, pad);
    let beta = rms_bandwidth(x)?;
    let power = x.mean_power();
    snrs_db
        .iter()
        .enumerate()
        .map(|(si, &snr)| {
            let toas = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let noisy = add_awgn_with_reference(
                        &padded,
                        snr,
                        derive_seed(seed, 20 + si as u64, t),
                        power,
                    )?;
                    Ok(
                        estimate_toa(&differential_xcorr(&noisy, x, phy.symbol_period())?)?
                            .toa_seconds,
                    )
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean = toas.iter().sum::<f64>() / trials as f64;
            let std =
                (toas.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt();
            let energy_snr = x.len() as f64 * 10f64.powf(snr / 10.0);
            Ok(CrlbRow {
                snr_db: snr,
                energy_snr,
                beta_rms: beta,
                toa_std: std,
                crlb_std: crlb_toa_std(energy_snr, beta)?,
            })
        })
        .collect()
}

/// ToA change, in samples, caused by `mask` on clean packets fed straight
/// to the receiver, one value per packet.
pub fn mask_null_study(
    phy: PhyMode,
    mask: &MaskSpec,
    n_packets: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..n_packets as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = CsSyncConfig::new(
                phy,
                Payload::Random { n_bits: 128 },
                derive_seed(seed, 30, i),
            );
            let packet = CsSyncPacket::generate(&cfg)?;
            let x = &packet.waveform;
            let pad = 8 * packet.oversampling;
            let clean = x.padded(pad, pad);
            let masked = apply_mask(&clean, mask)?;
            let toa = |s: &Signal| -> Result<f64> {
                Ok(estimate_toa(&differential_xcorr(s, x, phy.symbol_period())?)?.toa_seconds)
            };
            Ok((toa(&masked)? - toa(&clean)?) * x.rate())
        })
        .collect()
}
